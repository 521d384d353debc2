#pragma once

#include <string>
#include <string_view>

namespace ngviz {

/// Printable ASCII passes through; every other byte, plus tab and backslash,
/// becomes a lowercase "\xNN" escape.
std::string hex_escape(std::string_view bytes);

/// Inverse of hex_escape. Throws Error{BadFingerprint} on a malformed escape.
std::string hex_unescape(std::string_view text);

/// Escapes the five XML special characters; non-printable bytes become '?'.
std::string xml_escape(std::string_view text);

}  // namespace ngviz
