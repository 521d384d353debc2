#include "ngviz/escape.hpp"

#include "ngviz/error.hpp"

namespace ngviz {

namespace {

constexpr std::string_view kHexDigits = "0123456789abcdef";

bool passes_through(unsigned char c) {
    return c >= 0x20 && c <= 0x7e && c != '\\';
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string hex_escape(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (char ch : bytes) {
        const auto c = static_cast<unsigned char>(ch);
        if (passes_through(c)) {
            out.push_back(ch);
        } else {
            out += "\\x";
            out.push_back(kHexDigits[c >> 4]);
            out.push_back(kHexDigits[c & 0x0f]);
        }
    }
    return out;
}

std::string hex_unescape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out.push_back(text[i]);
            continue;
        }
        if (i + 4 > text.size()) {
            throw Error(Errc::BadFingerprint, "truncated escape sequence");
        }
        if (text[i + 1] != 'x') {
            throw Error(Errc::BadFingerprint, "unknown escape sequence");
        }
        const int hi = hex_value(text[i + 2]);
        const int lo = hex_value(text[i + 3]);
        if (hi < 0 || lo < 0) {
            throw Error(Errc::BadFingerprint, "bad hex digit in escape");
        }
        out.push_back(static_cast<char>((hi << 4) | lo));
        i += 3;
    }
    return out;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: {
                const auto c = static_cast<unsigned char>(ch);
                out.push_back(c >= 0x20 && c <= 0x7e ? ch : '?');
            }
        }
    }
    return out;
}

}  // namespace ngviz
