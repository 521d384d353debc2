#include "ngviz/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "ngviz/error.hpp"
#include "ngviz/escape.hpp"

namespace ngviz {

namespace {

void check_order(int n) {
    if (n < 1 || n > kMaxOrder) {
        throw Error(Errc::InvalidArgument, fmt::format("n-gram order {} outside 1..{}", n, kMaxOrder));
    }
}

void count_label(NgramTable::Counts& counts, std::string_view label, int n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= label.size(); ++i) {
        ++counts[std::string(label.substr(i, width))];
    }
}

void count_name(NgramTable::Counts& counts, const QueryName& name, int n, Scope scope) {
    if (scope == Scope::whole_name) {
        for (const auto& label : name.labels()) count_label(counts, label, n);
    } else {
        for (const auto& label : subdomain_labels(name)) count_label(counts, label, n);
    }
}

template <typename Range, typename NameOf>
NgramTable build(const Range& items, NameOf name_of, int n, bool dedup, Scope scope) {
    check_order(n);
    NgramTable::Counts counts;
    std::unordered_set<std::string> seen;
    for (const auto& item : items) {
        const QueryName& name = name_of(item);
        if (dedup && !seen.insert(name.normalized()).second) continue;
        count_name(counts, name, n, scope);
    }
    if (counts.empty()) {
        throw Error(Errc::EmptyTable, "no n-grams were produced");
    }
    return NgramTable(n, scope, std::move(counts));
}

}  // namespace

std::string_view to_string(Scope scope) noexcept {
    return scope == Scope::whole_name ? "whole_name" : "subdomain_only";
}

std::vector<std::string> extract_ngrams(std::string_view label, int n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "n-gram order must be at least 1");
    std::vector<std::string> out;
    const auto width = static_cast<std::size_t>(n);
    if (label.size() < width) return out;
    out.reserve(label.size() - width + 1);
    for (std::size_t i = 0; i + width <= label.size(); ++i) {
        out.emplace_back(label.substr(i, width));
    }
    return out;
}

NgramTable::NgramTable(int n, Scope scope, Counts counts)
    : n_(n), scope_(scope), counts_(std::move(counts)) {
    check_order(n);
    std::erase_if(counts_, [](const auto& kv) { return kv.second == 0; });
    ranking_.reserve(counts_.size());
    for (const auto& [gram, count] : counts_) {
        ranking_.push_back({gram, count});
        total_ += count;
    }
    std::sort(ranking_.begin(), ranking_.end(), [](const RankedNgram& a, const RankedNgram& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.ngram < b.ngram;
    });
    rank_index_.reserve(ranking_.size());
    for (std::size_t i = 0; i < ranking_.size(); ++i) {
        rank_index_.emplace(ranking_[i].ngram, i + 1);
    }
}

std::optional<std::size_t> NgramTable::rank_of(std::string_view ngram) const {
    const auto it = rank_index_.find(std::string(ngram));
    if (it == rank_index_.end()) return std::nullopt;
    return it->second;
}

double NgramTable::relative_frequency(std::size_t rank) const noexcept {
    if (rank == 0 || rank > ranking_.size() || total_ == 0) return 0.0;
    return static_cast<double>(ranking_[rank - 1].count) / static_cast<double>(total_);
}

NgramTable build_table(std::span<const QueryName> names, int n, bool dedup, Scope scope) {
    return build(names, [](const QueryName& q) -> const QueryName& { return q; }, n, dedup, scope);
}

NgramTable build_table(std::span<const QueryRecord> records, int n, bool dedup, Scope scope) {
    return build(records, [](const QueryRecord& r) -> const QueryName& { return r.name; }, n, dedup,
                 scope);
}

NgramTable merge(const NgramTable& a, const NgramTable& b) {
    if (a.order() != b.order()) {
        throw Error(Errc::OrderMismatch, fmt::format("cannot merge n={} with n={}", a.order(), b.order()));
    }
    if (a.scope() != b.scope()) {
        throw Error(Errc::InvalidArgument, "cannot merge tables of different scope");
    }
    auto counts = a.counts();
    for (const auto& [gram, count] : b.counts()) counts[gram] += count;
    return NgramTable(a.order(), a.scope(), std::move(counts));
}

std::vector<double> freq_deltas(const NgramTable& table) {
    if (table.size() < 2) {
        throw Error(Errc::TooFewNgrams,
                    fmt::format("need at least 2 distinct n-grams, have {}", table.size()));
    }
    std::vector<double> deltas;
    deltas.reserve(table.size() - 1);
    for (std::size_t rank = 1; rank < table.size(); ++rank) {
        deltas.push_back(table.relative_frequency(rank) - table.relative_frequency(rank + 1));
    }
    return deltas;
}

double shannon_entropy(const NgramTable& table) {
    double h = 0.0;
    for (std::size_t rank = 1; rank <= table.size(); ++rank) {
        const double p = table.relative_frequency(rank);
        h -= p * std::log2(p);
    }
    return h;
}

void write_fingerprint(std::ostream& out, const Fingerprint& fp) {
    const auto& t = fp.table;
    out << fmt::format("ngviz-fp v1 n={} total={}\n", t.order(), t.total());
    for (const auto& entry : t.ranking()) {
        out << hex_escape(entry.ngram) << '\t' << entry.count << '\n';
    }
    if (!out) throw Error(Errc::Io, "failed writing fingerprint");
}

namespace {

template <typename Int>
bool parse_uint(std::string_view text, Int& value) {
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Fingerprint read_fingerprint(std::istream& in, std::string source_label, Scope scope) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::BadFingerprint, "missing header line");
    }
    constexpr std::string_view kPrefix = "ngviz-fp v1 n=";
    constexpr std::string_view kTotal = " total=";
    std::string_view header = line;
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    const auto total_at = header.find(kTotal);
    int n = 0;
    std::uint64_t declared_total = 0;
    if (!header.starts_with(kPrefix) || total_at == std::string_view::npos ||
        !parse_uint(header.substr(kPrefix.size(), total_at - kPrefix.size()), n) ||
        !parse_uint(header.substr(total_at + kTotal.size()), declared_total)) {
        throw Error(Errc::BadFingerprint, "bad header: " + hex_escape(header));
    }
    if (n < 1 || n > kMaxOrder) {
        throw Error(Errc::BadFingerprint, fmt::format("unsupported order n={}", n));
    }

    NgramTable::Counts counts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = line;
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        if (row.empty()) continue;
        const auto tab = row.find('\t');
        std::uint64_t count = 0;
        if (tab == std::string_view::npos || !parse_uint(row.substr(tab + 1), count) || count == 0) {
            throw Error(Errc::BadFingerprint, fmt::format("line {}: expected <ngram>\\t<count>", line_no));
        }
        auto gram = hex_unescape(row.substr(0, tab));
        if (gram.size() != static_cast<std::size_t>(n)) {
            throw Error(Errc::BadFingerprint,
                        fmt::format("line {}: n-gram of {} bytes in an n={} file", line_no, gram.size(), n));
        }
        if (!counts.emplace(std::move(gram), count).second) {
            throw Error(Errc::BadFingerprint, fmt::format("line {}: duplicate n-gram", line_no));
        }
    }
    if (counts.empty()) {
        throw Error(Errc::EmptyTable, "fingerprint has no n-grams");
    }
    NgramTable table(n, scope, std::move(counts));
    if (table.total() != declared_total) {
        throw Error(Errc::BadFingerprint, fmt::format("header total {} but counts sum to {}",
                                                      declared_total, table.total()));
    }
    if (source_label.empty()) source_label = "fingerprint";
    // Dedup is not recorded in the file.
    return Fingerprint{std::move(table), std::move(source_label), false};
}

}  // namespace ngviz
