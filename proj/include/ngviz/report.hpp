#pragma once

#include <span>
#include <string>
#include <vector>

#include "ngviz/ngram.hpp"
#include "ngviz/segmentation.hpp"

namespace ngviz {

struct ReportRow {
    std::string key;
    std::size_t window_index = 0;
    std::size_t k_input = 0;
    double rank_match = 0.0;
    double freq_match = 0.0;
    double total_match = 0.0;
    bool flagged = false;
};

ReportRow to_row(const ScoredSegment& scored);
std::vector<ReportRow> to_rows(std::span<const ScoredSegment> scored);

enum class ReportFormat : std::uint8_t { tsv, json_lines };

/// Scores are printed with four decimals and keys are hex-escaped. The output
/// depends only on the rows: no timestamps and no locale.
std::string render_report(std::span<const ReportRow> rows, ReportFormat format);

/// Indices into freq_deltas(table) that count as spikes: the drop exceeds three
/// times the median drop, and the underlying count difference exceeds three
/// standard deviations of Poisson noise, 3 * sqrt(c_i + c_{i+1}).
std::vector<std::size_t> delta_spikes(const NgramTable& table);

/// Frequency-by-rank overlay of the fingerprint and the input over ranks
/// 1..top_k. Each series is cut to the ranks it actually has.
std::string render_rank_chart(const NgramTable& input, const Fingerprint& fp, std::size_t top_k);

/// Bar chart of freq_deltas(table) with spikes drawn in a separate style.
std::string render_delta_chart(const NgramTable& table);

}  // namespace ngviz
