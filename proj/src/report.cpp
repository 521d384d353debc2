#include "ngviz/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ngviz/error.hpp"
#include "ngviz/escape.hpp"

namespace ngviz {

ReportRow to_row(const ScoredSegment& scored) {
    return ReportRow{scored.key,
                     scored.window_index,
                     scored.score.k_input,
                     scored.score.rank_match,
                     scored.score.freq_match,
                     scored.score.total_match,
                     scored.flagged};
}

std::vector<ReportRow> to_rows(std::span<const ScoredSegment> scored) {
    std::vector<ReportRow> rows;
    rows.reserve(scored.size());
    for (const auto& s : scored) rows.push_back(to_row(s));
    return rows;
}

namespace {

std::string json_string(std::string_view text) {
    // hex_escape leaves only printable ASCII; its backslashes still need JSON escaping.
    std::string out = "\"";
    for (char c : hex_escape(text)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_report(std::span<const ReportRow> rows, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::tsv) {
        out += "key\twindow_index\tk_input\trank_match\tfreq_match\ttotal_match\tflagged\n";
        for (const auto& r : rows) {
            out += fmt::format("{}\t{}\t{}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", hex_escape(r.key),
                               r.window_index, r.k_input, r.rank_match, r.freq_match, r.total_match,
                               r.flagged);
        }
        return out;
    }
    for (const auto& r : rows) {
        out += fmt::format(
            "{{\"key\":{},\"window_index\":{},\"k_input\":{},\"rank_match\":{:.4f},"
            "\"freq_match\":{:.4f},\"total_match\":{:.4f},\"flagged\":{}}}\n",
            json_string(r.key), r.window_index, r.k_input, r.rank_match, r.freq_match, r.total_match,
            r.flagged);
    }
    return out;
}

std::vector<std::size_t> delta_spikes(const NgramTable& table) {
    const auto deltas = freq_deltas(table);
    auto sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const auto mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    const auto ranking = table.ranking();
    std::vector<std::size_t> spikes;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto hi = static_cast<double>(ranking[i].count);
        const auto lo = static_cast<double>(ranking[i + 1].count);
        const bool above_median = deltas[i] > 3.0 * median;
        const bool above_noise = hi - lo > 3.0 * std::sqrt(hi + lo);
        if (above_median && above_noise) spikes.push_back(i);
    }
    return spikes;
}

namespace {

// Shared chart geometry, in viewBox units.
constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;
constexpr int kYTicks = 5;
constexpr std::size_t kMaxXTicks = 10;

struct Frame {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::size_t x_count = 1;  ///< positions 1..x_count along the x axis
    double y_max = 1.0;
};

double x_at(const Frame& f, std::size_t position) {
    if (f.x_count <= 1) return kLeft + kPlotW / 2;
    return kLeft + kPlotW * static_cast<double>(position - 1) / static_cast<double>(f.x_count - 1);
}

double y_at(const Frame& f, double value) {
    return kTop + kPlotH * (1.0 - std::clamp(value / f.y_max, 0.0, 1.0));
}

std::string open_svg(const Frame& f) {
    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
        "<text x=\"{2:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{3}</text>\n",
        kWidth, kHeight, kLeft + kPlotW / 2, xml_escape(f.title));

    // Axes.
    out += fmt::format(
        "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n"
        "<line x1=\"{0:.2f}\" y1=\"{2:.2f}\" x2=\"{3:.2f}\" y2=\"{2:.2f}\"/>\n"
        "</g>\n",
        kLeft, kTop, kTop + kPlotH, kLeft + kPlotW);

    // Y ticks.
    out += "<g id=\"y-ticks\">\n";
    for (int i = 0; i <= kYTicks; ++i) {
        const double value = f.y_max * i / kYTicks;
        const double y = y_at(f, value);
        out += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>"
            "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.4f}</text>\n",
            kLeft - 5, y, kLeft, kLeft - 8, y + 4, value);
    }
    out += "</g>\n";

    // X ticks, at most kMaxXTicks of them, always including the first and last position.
    out += "<g id=\"x-ticks\">\n";
    const std::size_t step = std::max<std::size_t>(1, (f.x_count + kMaxXTicks - 1) / kMaxXTicks);
    for (std::size_t pos = 1; pos <= f.x_count; pos += step) {
        const bool near_last = pos != f.x_count && f.x_count - pos < step / 2;
        if (near_last) continue;
        const double x = x_at(f, pos);
        out += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
            "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4}</text>\n",
            x, kTop + kPlotH, kTop + kPlotH + 5, kTop + kPlotH + 20, pos);
    }
    if ((f.x_count - 1) % step != 0) {
        const double x = x_at(f, f.x_count);
        out += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
            "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4}</text>\n",
            x, kTop + kPlotH, kTop + kPlotH + 5, kTop + kPlotH + 20, f.x_count);
    }
    out += "</g>\n";

    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n"
        "<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
        kLeft + kPlotW / 2, kHeight - 16, xml_escape(f.x_label), kTop + kPlotH / 2,
        kTop + kPlotH / 2, xml_escape(f.y_label));
    return out;
}

std::string polyline(const Frame& f, std::string_view id, std::string_view color,
                     std::span<const double> values) {
    std::string points;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) points += ' ';
        points += fmt::format("{:.2f},{:.2f}", x_at(f, i + 1), y_at(f, values[i]));
    }
    return fmt::format(
        "<polyline id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", id,
        color, points);
}

std::string legend_entry(int row, std::string_view color, std::string_view label) {
    const double x = kLeft + kPlotW + 15;
    const double y = kTop + 10 + 20 * row;
    return fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"3\"/><text x=\"{4:.2f}\" y=\"{5:.2f}\">{6}</text>\n",
        x, y, x + 20, color, x + 26, y + 4, xml_escape(label));
}

std::vector<double> frequencies(const NgramTable& table, std::size_t limit) {
    std::vector<double> values;
    const auto n = std::min(limit, table.size());
    values.reserve(n);
    for (std::size_t rank = 1; rank <= n; ++rank) values.push_back(table.relative_frequency(rank));
    return values;
}

}  // namespace

std::string render_rank_chart(const NgramTable& input, const Fingerprint& fp, std::size_t top_k) {
    if (top_k == 0) throw Error(Errc::InvalidArgument, "top_k must be at least 1");
    if (input.empty() || fp.table.empty()) {
        throw Error(Errc::TooFewNgrams, "both tables need at least one n-gram");
    }
    const auto fp_values = frequencies(fp.table, top_k);
    const auto in_values = frequencies(input, top_k);

    Frame frame;
    frame.title = fmt::format("{}-gram frequency by rank", input.order());
    frame.x_label = "rank";
    frame.y_label = "relative frequency";
    frame.x_count = std::max(fp_values.size(), in_values.size());
    frame.y_max = std::max(fp_values.front(), in_values.front());

    std::string out = open_svg(frame);
    out += "<g id=\"series\">\n";
    out += polyline(frame, "series-fingerprint", "#1f77b4", fp_values);
    out += polyline(frame, "series-input", "#d62728", in_values);
    out += "</g>\n<g id=\"legend\">\n";
    out += legend_entry(0, "#1f77b4", "fingerprint: " + fp.source_label);
    out += legend_entry(1, "#d62728", "input");
    out += "</g>\n</svg>\n";
    return out;
}

std::string render_delta_chart(const NgramTable& table) {
    const auto deltas = freq_deltas(table);
    const auto spikes = delta_spikes(table);

    Frame frame;
    frame.title = fmt::format("change in {}-gram frequency by rank", table.order());
    frame.x_label = "rank i (drop from i to i+1)";
    frame.y_label = "frequency drop";
    frame.x_count = deltas.size();
    const double max_delta = *std::max_element(deltas.begin(), deltas.end());
    frame.y_max = max_delta > 0.0 ? max_delta : 1.0;

    const double slot = kPlotW / static_cast<double>(std::max<std::size_t>(deltas.size(), 1));
    const double bar_w = std::clamp(slot * 0.6, 1.0, 24.0);

    std::string out = open_svg(frame);
    out += "<g id=\"series\">\n";
    std::size_t next_spike = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const bool spike = next_spike < spikes.size() && spikes[next_spike] == i;
        if (spike) ++next_spike;
        const double cx = x_at(frame, i + 1);
        const double x = std::clamp(cx - bar_w / 2, kLeft, kLeft + kPlotW - bar_w);
        const double y = y_at(frame, deltas[i]);
        out += fmt::format(
            "<rect class=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
            spike ? "spike" : "delta", x, y, bar_w, kTop + kPlotH - y, spike ? "#d62728" : "#1f77b4");
        if (spike) {
            out += fmt::format(
                "<circle class=\"spike-marker\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#d62728\"/>\n",
                cx, std::max(y - 6, kTop));
        }
    }
    out += "</g>\n<g id=\"legend\">\n";
    out += legend_entry(0, "#1f77b4", "drop");
    out += legend_entry(1, "#d62728", fmt::format("spike ({})", spikes.size()));
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace ngviz
