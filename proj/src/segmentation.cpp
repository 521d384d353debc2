#include "ngviz/segmentation.hpp"

#include <algorithm>
#include <unordered_set>

#include "ngviz/error.hpp"

namespace ngviz {

std::string_view to_string(SplitMode mode) noexcept {
    switch (mode) {
        case SplitMode::none: return "none";
        case SplitMode::by_ip: return "ip";
        case SplitMode::by_domain: return "domain";
        case SplitMode::by_ip_and_domain: return "ip+domain";
    }
    return "none";
}

Groups split(std::span<const QueryRecord> records, SplitMode mode) {
    Groups groups;
    for (const auto& rec : records) {
        std::string key;
        switch (mode) {
            case SplitMode::none: key = kAllKey; break;
            case SplitMode::by_ip: key = rec.client_ip.to_string(); break;
            case SplitMode::by_domain: key = registered_domain(rec.name); break;
            case SplitMode::by_ip_and_domain:
                key = rec.client_ip.to_string() + "|" + registered_domain(rec.name);
                break;
        }
        groups[key].push_back(rec);
    }
    return groups;
}

std::size_t min_tail_window(std::size_t size) noexcept {
    return std::max<std::size_t>(2, size / 10);
}

std::vector<Segment> window(const std::string& key, std::span<const QueryRecord> group,
                            std::size_t size, bool dedup) {
    if (size == 0) throw Error(Errc::InvalidArgument, "window size must be at least 1");

    std::vector<QueryRecord> unique;
    if (dedup) {
        std::unordered_set<std::string> seen;
        for (const auto& rec : group) {
            if (seen.insert(rec.name.normalized()).second) unique.push_back(rec);
        }
        group = unique;
    }

    std::vector<Segment> windows;
    for (std::size_t start = 0; start < group.size(); start += size) {
        const auto len = std::min(size, group.size() - start);
        if (len < size && len < min_tail_window(size)) break;
        const auto chunk = group.subspan(start, len);
        windows.push_back(Segment{key, windows.size(), {chunk.begin(), chunk.end()}});
    }
    return windows;
}

ScoredSegment score_segment(const Segment& segment, const Fingerprint& fp,
                            const ScoringOptions& options) {
    const auto table = build_table(segment.records, options.n, options.dedup, options.scope);
    ScoredSegment scored;
    scored.key = segment.key;
    scored.window_index = segment.window_index;
    scored.score = total_match(table, fp, options.params);
    scored.flagged = scored.score.total_match < options.threshold;
    return scored;
}

std::vector<ScoredSegment> rank_results(std::vector<ScoredSegment> scored, SortOrder order) {
    std::sort(scored.begin(), scored.end(), [order](const ScoredSegment& a, const ScoredSegment& b) {
        if (a.score.total_match != b.score.total_match) {
            return order == SortOrder::ascending ? a.score.total_match < b.score.total_match
                                                 : a.score.total_match > b.score.total_match;
        }
        if (a.key != b.key) return a.key < b.key;
        return a.window_index < b.window_index;
    });
    return scored;
}

}  // namespace ngviz
