#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ngviz/domain.hpp"

namespace ngviz {

inline constexpr int kMaxOrder = 3;

/// Which labels of a name feed the n-gram counts.
enum class Scope : std::uint8_t { whole_name, subdomain_only };

std::string_view to_string(Scope scope) noexcept;

/// Width-n windows over the label's bytes with stride 1. A label shorter
/// than n yields nothing. Throws InvalidArgument when n < 1.
std::vector<std::string> extract_ngrams(std::string_view label, int n);

struct RankedNgram {
    std::string ngram;
    std::uint64_t count = 0;
};

/// N-gram occurrence counts with a dense ranking (count descending, ties by
/// ascending byte order). Immutable once built.
class NgramTable {
public:
    using Counts = std::unordered_map<std::string, std::uint64_t>;

    /// Zero counts are dropped. Throws InvalidArgument for n outside 1..3.
    NgramTable(int n, Scope scope, Counts counts);

    [[nodiscard]] int order() const noexcept { return n_; }
    [[nodiscard]] Scope scope() const noexcept { return scope_; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    [[nodiscard]] std::size_t size() const noexcept { return ranking_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ranking_.empty(); }
    [[nodiscard]] const Counts& counts() const noexcept { return counts_; }

    /// Entry i holds rank i + 1.
    [[nodiscard]] std::span<const RankedNgram> ranking() const noexcept { return ranking_; }

    /// 1-based rank of `ngram`, or nullopt when absent.
    [[nodiscard]] std::optional<std::size_t> rank_of(std::string_view ngram) const;

    /// count(rank) / total for a 1-based rank; 0 past the end of the table.
    [[nodiscard]] double relative_frequency(std::size_t rank) const noexcept;

    friend bool operator==(const NgramTable& a, const NgramTable& b) {
        return a.n_ == b.n_ && a.scope_ == b.scope_ && a.counts_ == b.counts_;
    }

private:
    int n_;
    Scope scope_;
    Counts counts_;
    std::uint64_t total_ = 0;
    std::vector<RankedNgram> ranking_;
    std::unordered_map<std::string, std::size_t> rank_index_;
};

/// The legitimate-traffic baseline every input is compared against.
struct Fingerprint {
    NgramTable table;
    std::string source_label;
    bool dedup_applied = true;
};

/// Counts n-grams over the chosen labels of each name. With `dedup` only the
/// first occurrence of each normalized name contributes. Throws
/// InvalidArgument for n outside 1..3 and EmptyTable if nothing was counted.
NgramTable build_table(std::span<const QueryName> names, int n, bool dedup, Scope scope);
NgramTable build_table(std::span<const QueryRecord> records, int n, bool dedup, Scope scope);

/// Sums the counts of two tables of the same order and scope.
NgramTable merge(const NgramTable& a, const NgramTable& b);

/// Drop in relative frequency from each rank to the next (K - 1 values).
/// Throws TooFewNgrams when the table has fewer than two entries.
std::vector<double> freq_deltas(const NgramTable& table);

/// Shannon entropy of the n-gram distribution, in bits.
double shannon_entropy(const NgramTable& table);

/// "ngviz-fp v1 n=<order> total=<total>" followed by one
/// "<hex-escaped ngram>\t<count>" line per entry in rank order.
void write_fingerprint(std::ostream& out, const Fingerprint& fp);

/// Parses the format produced by write_fingerprint(). The file does not record
/// scope or dedup, so the caller supplies the scope the table was built with
/// and dedup_applied comes back false.
/// Throws BadFingerprint on malformed input.
Fingerprint read_fingerprint(std::istream& in, std::string source_label,
                             Scope scope = Scope::whole_name);

}  // namespace ngviz
