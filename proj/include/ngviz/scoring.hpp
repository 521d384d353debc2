#pragma once

#include <cstddef>

#include "ngviz/ngram.hpp"

namespace ngviz {

/// How an input n-gram that never occurs in the fingerprint is ranked.
enum class MissingRankPolicy : std::uint8_t {
    fingerprint_size_plus_one,
};

/// Exponents and weights of the match formulas. Defaults a = b = 1 and
/// x = y = 0.5.
struct MatchParams {
    double a = 1.0;  ///< exponent on the rank score
    double b = 1.0;  ///< exponent on the frequency score
    double x = 0.5;  ///< weight of the rank score
    double y = 0.5;  ///< weight of the frequency score
    MissingRankPolicy missing_rank_policy = MissingRankPolicy::fingerprint_size_plus_one;

    /// Throws InvalidArgument unless a, b >= 0, x, y in [0, 1] and x + y = 1.
    void validate() const;
};

inline constexpr double kWeightSumTolerance = 1e-12;
inline constexpr double kDefaultThreshold = 0.5;

struct MatchScore {
    double rank_match = 0.0;
    double freq_match = 0.0;
    double total_match = 0.0;
    std::size_t k_input = 0;
    std::size_t k_fingerprint = 0;
};

/// ((K - D) / K)^a where K is the number of distinct input n-grams and D the
/// mean absolute rank difference against the fingerprint. Clamped to [0, 1].
double rank_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params);

/// (mean over input ranks i of min(f_in, f_fp) / max(f_in, f_fp))^b, where the
/// two frequencies are taken at the same rank regardless of which n-gram sits
/// there. Ranks past the end of the fingerprint contribute 0.
double freq_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params);

/// x * rank_match + y * freq_match.
MatchScore total_match(const NgramTable& input, const Fingerprint& fp, const MatchParams& params);

}  // namespace ngviz
