#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ngviz::cli {

enum ExitCode : int {
    kExitClean = 0,
    kExitUsage = 1,
    kExitInput = 2,
    kExitDetected = 3,
};

/// Runs `ngviz <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ngviz::cli
