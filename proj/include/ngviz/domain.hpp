#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ngviz {

inline constexpr std::size_t kMaxLabelBytes = 63;
inline constexpr std::size_t kMaxNameBytes = 253;

/// A DNS query name split into lowercase labels.
///
/// Only constructible through parse_name(), so every instance satisfies the
/// hostname length limits. Bytes outside the usual hostname alphabet are
/// kept as-is; only ASCII letters are folded.
class QueryName {
public:
    [[nodiscard]] const std::string& raw() const noexcept { return raw_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::string& normalized() const noexcept { return normalized_; }

    friend bool operator==(const QueryName& a, const QueryName& b) noexcept {
        return a.normalized_ == b.normalized_;
    }

private:
    friend QueryName parse_name(std::string_view text);
    QueryName() = default;

    std::string raw_;
    std::vector<std::string> labels_;
    std::string normalized_;
};

/// Parses a textual name. Surrounding whitespace and a single trailing root
/// dot are removed. Throws Error{EmptyName|EmptyLabel|LabelTooLong|NameTooLong}.
QueryName parse_name(std::string_view text);

/// Last two labels joined by '.', or the only label. No public-suffix list.
std::string registered_domain(const QueryName& name);

/// Labels to the left of registered_domain(), in order.
std::vector<std::string> subdomain_labels(const QueryName& name);

struct Ipv4 {
    std::array<std::uint8_t, 4> octets{};

    [[nodiscard]] std::string to_string() const;
    auto operator<=>(const Ipv4&) const = default;
};

enum class Direction : std::uint8_t { query, response };

std::string_view to_string(Direction d) noexcept;

struct Timestamp {
    std::uint32_t seconds = 0;
    std::uint32_t microseconds = 0;

    auto operator<=>(const Timestamp&) const = default;
};

/// One observed question name. For responses client_ip is the packet's
/// destination, i.e. the host that asked.
struct QueryRecord {
    QueryName name;
    Ipv4 client_ip;
    Direction direction = Direction::query;
    Timestamp timestamp;
    std::uint64_t seq = 0;
};

}  // namespace ngviz
