#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ngviz/domain.hpp"

namespace ngviz {

enum class Encoding : std::uint8_t { base32, base64url, hex };

std::string_view to_string(Encoding e) noexcept;
std::string_view alphabet(Encoding e) noexcept;

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t count = 1000;
    std::string apex = "t.example.com";  ///< may be empty: no suffix appended
    Encoding encoding = Encoding::base32;
    std::size_t label_min = 16;
    std::size_t label_max = 40;

    /// Throws InvalidArgument when count is 0, the label range leaves [1, 63],
    /// or the longest possible name would exceed 253 bytes.
    void validate() const;
};

/// Deterministic random source shared by the generators.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Bounded draws use rejection sampling on the raw 64-bit output
/// instead of std::uniform_int_distribution, whose algorithm differs between
/// standard libraries.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(below(hi - lo + 1));
    }

    /// `len` symbols drawn uniformly from `symbols`.
    std::string draw(std::string_view symbols, std::size_t len);

private:
    std::mt19937_64 engine_;
};

/// Names of the form <label>[.<label>].<apex>; each label is uniform over the
/// encoding alphabet with a length uniform in [label_min, label_max], and the
/// second label is present with probability 1/2.
class TunnelGenerator {
public:
    explicit TunnelGenerator(SynthConfig config);
    QueryName next();

private:
    SynthConfig config_;
    SynthRng rng_;
};

/// Word-composed names such as "river.com", "www.greenfield.net",
/// "north-media.org" or "cdn3.travel.io".
class LegitGenerator {
public:
    explicit LegitGenerator(std::uint64_t seed);
    QueryName next();

private:
    SynthRng rng_;
};

std::vector<QueryName> gen_tunnel(const SynthConfig& config);
std::vector<QueryName> gen_legit(std::uint64_t seed, std::size_t count);

/// Names "<fixed_label>.<random label>[.<apex>]": many subdomains that share
/// one label, the pattern that produces spikes in the frequency-drop chart.
std::vector<QueryName> gen_repeated_label(const SynthConfig& config, std::string_view fixed_label);

/// The embedded English word list the legitimate generator draws from.
std::span<const std::string_view> wordlist();

inline constexpr std::string_view kLegitTlds[] = {"com", "net", "org", "io", "co"};

}  // namespace ngviz
