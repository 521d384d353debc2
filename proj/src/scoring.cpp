#include "ngviz/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ngviz/error.hpp"

namespace ngviz {

namespace {

void check_inputs(const NgramTable& input, const Fingerprint& fp, const MatchParams& params) {
    params.validate();
    if (input.empty()) throw Error(Errc::EmptyInput, "input table has no n-grams");
    if (fp.table.empty()) throw Error(Errc::EmptyInput, "fingerprint has no n-grams");
    if (input.order() != fp.table.order()) {
        throw Error(Errc::OrderMismatch, fmt::format("input n={} but fingerprint n={}", input.order(),
                                                     fp.table.order()));
    }
}

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void MatchParams::validate() const {
    if (!finite_non_negative(a) || !finite_non_negative(b)) {
        throw Error(Errc::InvalidArgument, fmt::format("exponents must be >= 0 (a={}, b={})", a, b));
    }
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
        throw Error(Errc::InvalidArgument, fmt::format("weights must lie in [0,1] (x={}, y={})", x, y));
    }
    if (std::abs(x + y - 1.0) > kWeightSumTolerance) {
        throw Error(Errc::InvalidArgument, fmt::format("weights must sum to 1 (x={}, y={})", x, y));
    }
}

double rank_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params) {
    check_inputs(input, fp, params);
    const auto k_input = input.size();
    const auto missing_rank = fp.table.size() + 1;

    double diff_sum = 0.0;
    const auto ranking = input.ranking();
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto in_rank = static_cast<double>(i + 1);
        const auto fp_rank = static_cast<double>(fp.table.rank_of(ranking[i].ngram).value_or(missing_rank));
        diff_sum += std::abs(in_rank - fp_rank);
    }
    const double k = static_cast<double>(k_input);
    const double mean_diff = diff_sum / k;
    const double base = std::clamp((k - mean_diff) / k, 0.0, 1.0);
    return std::clamp(std::pow(base, params.a), 0.0, 1.0);
}

double freq_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params) {
    check_inputs(input, fp, params);
    double pct_sum = 0.0;
    for (std::size_t rank = 1; rank <= input.size(); ++rank) {
        const double f_in = input.relative_frequency(rank);
        const double f_fp = fp.table.relative_frequency(rank);
        if (f_fp <= 0.0) continue;
        pct_sum += std::min(f_in, f_fp) / std::max(f_in, f_fp);
    }
    const double base = std::clamp(pct_sum / static_cast<double>(input.size()), 0.0, 1.0);
    return std::clamp(std::pow(base, params.b), 0.0, 1.0);
}

MatchScore total_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params) {
    MatchScore score;
    score.rank_match = rank_match(input, fp, params);
    score.freq_match = freq_match(input, fp, params);
    score.total_match =
        std::clamp(params.x * score.rank_match + params.y * score.freq_match, 0.0, 1.0);
    score.k_input = input.size();
    score.k_fingerprint = fp.table.size();
    return score;
}

}  // namespace ngviz
