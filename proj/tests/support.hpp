#pragma once

// Test-only helpers and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ngviz/domain.hpp"

namespace ngviz::test {

inline std::vector<QueryRecord> to_records(const std::vector<QueryName>& names) {
    std::vector<QueryRecord> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.push_back(QueryRecord{names[i], Ipv4{}, Direction::query, Timestamp{}, i});
    }
    return out;
}

inline std::vector<QueryRecord> to_records(std::initializer_list<const char*> names) {
    std::vector<QueryName> parsed;
    for (const char* n : names) parsed.push_back(parse_name(n));
    return to_records(parsed);
}

/// Every substring of length n, by index arithmetic.
inline std::multiset<std::string> naive_ngrams(const std::string& s, int n) {
    std::multiset<std::string> out;
    const auto width = static_cast<std::size_t>(n);
    if (s.size() < width) return out;
    for (std::size_t i = 0; i <= s.size() - width; ++i) {
        std::string g;
        for (std::size_t j = 0; j < width; ++j) g.push_back(s[i + j]);
        out.insert(g);
    }
    return out;
}

/// Brute-force counts over the dot-separated pieces of each name.
inline std::map<std::string, std::uint64_t> naive_counts(const std::vector<std::string>& names, int n) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& name : names) {
        std::string label;
        auto flush = [&] {
            for (const auto& g : naive_ngrams(label, n)) ++counts[g];
            label.clear();
        };
        for (char c : name) {
            if (c == '.') {
                flush();
            } else {
                label.push_back(c);
            }
        }
        flush();
    }
    return counts;
}

/// Ranking by count descending then n-gram ascending, via a full sort of a
/// std::map snapshot.
inline std::vector<std::pair<std::string, std::uint64_t>> naive_ranking(
    const std::map<std::string, std::uint64_t>& counts) {
    std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return v;
}

/// Straight transcription of the three match formulas over naive rankings.
struct OracleScore {
    double rank = 0;
    double freq = 0;
    double total = 0;
};

inline OracleScore oracle_match(const std::map<std::string, std::uint64_t>& input,
                                const std::map<std::string, std::uint64_t>& fp, double a, double b,
                                double x, double y) {
    const auto in_rank = naive_ranking(input);
    const auto fp_rank = naive_ranking(fp);
    double in_total = 0;
    double fp_total = 0;
    for (const auto& [g, c] : in_rank) in_total += static_cast<double>(c);
    for (const auto& [g, c] : fp_rank) fp_total += static_cast<double>(c);

    const double k = static_cast<double>(in_rank.size());
    double diff = 0;
    for (std::size_t i = 0; i < in_rank.size(); ++i) {
        double r_fp = static_cast<double>(fp_rank.size() + 1);
        for (std::size_t j = 0; j < fp_rank.size(); ++j) {
            if (fp_rank[j].first == in_rank[i].first) {
                r_fp = static_cast<double>(j + 1);
                break;
            }
        }
        diff += std::fabs(static_cast<double>(i + 1) - r_fp);
    }
    const double d = diff / k;
    OracleScore s;
    s.rank = std::pow(std::max(0.0, (k - d) / k), a);

    double pct = 0;
    for (std::size_t i = 0; i < in_rank.size(); ++i) {
        if (i >= fp_rank.size()) continue;
        const double f_in = static_cast<double>(in_rank[i].second) / in_total;
        const double f_fp = static_cast<double>(fp_rank[i].second) / fp_total;
        pct += std::min(f_in, f_fp) / std::max(f_in, f_fp);
    }
    s.freq = std::pow(pct / k, b);
    s.total = x * s.rank + y * s.freq;
    return s;
}

/// Random text over an alphabet, from a test-local engine.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t uniform(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    std::string text(std::string_view alphabet, std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[uniform(0, alphabet.size() - 1)]);
        return s;
    }

    std::string bytes(std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(uniform(0, 255)));
        return s;
    }

    /// Valid hostname made of 1..5 labels.
    std::string hostname() {
        static constexpr std::string_view kAlpha = "abcdefghijklmnopqrstuvwxyz0123456789-";
        const auto labels = uniform(1, 5);
        std::string s;
        for (std::size_t i = 0; i < labels; ++i) {
            if (i) s.push_back('.');
            s += text(kAlpha, uniform(1, 12));
        }
        return s;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Scratch directory removed at scope exit.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ngviz-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace ngviz::test
