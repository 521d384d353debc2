#include "ngviz/domain.hpp"

#include <fmt/format.h>

#include "ngviz/error.hpp"

namespace ngviz {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::EmptyName: return "EmptyName";
        case Errc::EmptyLabel: return "EmptyLabel";
        case Errc::LabelTooLong: return "LabelTooLong";
        case Errc::NameTooLong: return "NameTooLong";
        case Errc::BadMagic: return "BadMagic";
        case Errc::TruncatedHeader: return "TruncatedHeader";
        case Errc::UnsupportedLinktype: return "UnsupportedLinktype";
        case Errc::EmptyTable: return "EmptyTable";
        case Errc::TooFewNgrams: return "TooFewNgrams";
        case Errc::OrderMismatch: return "OrderMismatch";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::BadFingerprint: return "BadFingerprint";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

QueryName parse_name(std::string_view text) {
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    if (!text.empty() && text.back() == '.') text.remove_suffix(1);
    if (text.empty()) {
        throw Error(Errc::EmptyName, "name is blank");
    }
    if (text.size() > kMaxNameBytes) {
        throw Error(Errc::NameTooLong, fmt::format("{} bytes exceeds {}", text.size(), kMaxNameBytes));
    }

    QueryName name;
    name.raw_ = std::string(text);
    name.normalized_.reserve(text.size());

    std::size_t start = 0;
    while (true) {
        const auto dot = text.find('.', start);
        const auto label = text.substr(start, dot == std::string_view::npos ? dot : dot - start);
        if (label.empty()) {
            throw Error(Errc::EmptyLabel, fmt::format("empty label at offset {}", start));
        }
        if (label.size() > kMaxLabelBytes) {
            throw Error(Errc::LabelTooLong,
                        fmt::format("label of {} bytes exceeds {}", label.size(), kMaxLabelBytes));
        }
        std::string lowered(label);
        for (char& c : lowered) c = ascii_lower(c);
        if (!name.labels_.empty()) name.normalized_.push_back('.');
        name.normalized_ += lowered;
        name.labels_.push_back(std::move(lowered));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return name;
}

std::string registered_domain(const QueryName& name) {
    const auto& labels = name.labels();
    if (labels.size() == 1) return labels.front();
    return labels[labels.size() - 2] + "." + labels.back();
}

std::vector<std::string> subdomain_labels(const QueryName& name) {
    const auto& labels = name.labels();
    if (labels.size() <= 2) return {};
    return {labels.begin(), labels.end() - 2};
}

std::string Ipv4::to_string() const {
    return fmt::format("{}.{}.{}.{}", octets[0], octets[1], octets[2], octets[3]);
}

std::string_view to_string(Direction d) noexcept {
    return d == Direction::query ? "query" : "response";
}

}  // namespace ngviz
