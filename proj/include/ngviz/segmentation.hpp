#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ngviz/domain.hpp"
#include "ngviz/ngram.hpp"
#include "ngviz/scoring.hpp"

namespace ngviz {

enum class SplitMode : std::uint8_t { none, by_ip, by_domain, by_ip_and_domain };

std::string_view to_string(SplitMode mode) noexcept;

/// Key of the single group produced by SplitMode::none.
inline constexpr std::string_view kAllKey = "all";

using Groups = std::map<std::string, std::vector<QueryRecord>>;

/// Groups records by client IP, registered domain, both ("<ip>|<domain>"), or
/// not at all. Each group keeps the input order.
Groups split(std::span<const QueryRecord> records, SplitMode mode);

struct Segment {
    std::string key;
    std::size_t window_index = 0;
    std::vector<QueryRecord> records;
};

/// Smallest trailing window that is still scored: max(2, size / 10).
std::size_t min_tail_window(std::size_t size) noexcept;

/// Chunks a group into consecutive windows of `size` records, after reducing
/// it to first occurrences of each normalized name when `dedup` is set. A
/// short trailing window below min_tail_window(size) is dropped. Throws
/// InvalidArgument when size is 0.
std::vector<Segment> window(const std::string& key, std::span<const QueryRecord> group,
                            std::size_t size, bool dedup);

struct ScoredSegment {
    std::string key;
    std::size_t window_index = 0;
    MatchScore score;
    bool flagged = false;  ///< total_match < threshold
};

struct ScoringOptions {
    int n = 1;
    bool dedup = true;
    Scope scope = Scope::whole_name;
    MatchParams params;
    double threshold = kDefaultThreshold;
};

/// Builds the segment's table and scores it. Throws EmptyTable when the
/// segment yields no n-grams under the chosen scope.
ScoredSegment score_segment(const Segment& segment, const Fingerprint& fp,
                            const ScoringOptions& options);

enum class SortOrder : std::uint8_t { ascending, descending };

/// Orders by total_match (ascending puts the most suspicious first), ties by
/// (key, window_index) ascending.
std::vector<ScoredSegment> rank_results(std::vector<ScoredSegment> scored,
                                        SortOrder order = SortOrder::ascending);

}  // namespace ngviz
