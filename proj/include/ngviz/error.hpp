#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ngviz {

enum class Errc {
    EmptyName,
    EmptyLabel,
    LabelTooLong,
    NameTooLong,
    BadMagic,
    TruncatedHeader,
    UnsupportedLinktype,
    EmptyTable,
    TooFewNgrams,
    OrderMismatch,
    EmptyInput,
    BadFingerprint,
    InvalidArgument,
    Io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the Errc codes so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace ngviz
