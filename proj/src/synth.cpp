#include "ngviz/synth.hpp"

#include <limits>

#include <fmt/format.h>

#include "ngviz/error.hpp"

namespace ngviz {

namespace detail {
extern const std::string_view kWordListText;
}

namespace {

constexpr std::string_view kBase32 = "abcdefghijklmnopqrstuvwxyz234567";
constexpr std::string_view kBase64Url =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
constexpr std::string_view kHex = "0123456789abcdef";

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto word = text.substr(0, nl);
        if (!word.empty() && word.back() == '\r') word.remove_suffix(1);
        if (!word.empty()) words.push_back(word);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return words;
}

}  // namespace

std::string_view to_string(Encoding e) noexcept {
    switch (e) {
        case Encoding::base32: return "base32";
        case Encoding::base64url: return "base64url";
        case Encoding::hex: return "hex";
    }
    return "base32";
}

std::string_view alphabet(Encoding e) noexcept {
    switch (e) {
        case Encoding::base32: return kBase32;
        case Encoding::base64url: return kBase64Url;
        case Encoding::hex: return kHex;
    }
    return kBase32;
}

void SynthConfig::validate() const {
    if (count == 0) throw Error(Errc::InvalidArgument, "count must be at least 1");
    if (label_min < 1 || label_max > kMaxLabelBytes || label_min > label_max) {
        throw Error(Errc::InvalidArgument,
                    fmt::format("label length range [{}, {}] must lie within [1, {}]", label_min,
                                label_max, kMaxLabelBytes));
    }
    std::size_t longest = 2 * label_max + 1;
    if (!apex.empty()) {
        longest += 1 + parse_name(apex).normalized().size();
    }
    if (longest > kMaxNameBytes) {
        throw Error(Errc::InvalidArgument,
                    fmt::format("names of up to {} bytes would exceed {}", longest, kMaxNameBytes));
    }
}

std::uint64_t SynthRng::below(std::uint64_t bound) {
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
}

std::string SynthRng::draw(std::string_view symbols, std::size_t len) {
    std::string out(len, '\0');
    for (auto& c : out) c = symbols[below(symbols.size())];
    return out;
}

TunnelGenerator::TunnelGenerator(SynthConfig config) : config_(std::move(config)), rng_(config_.seed) {
    config_.validate();
}

QueryName TunnelGenerator::next() {
    const auto symbols = alphabet(config_.encoding);
    std::string text = rng_.draw(symbols, rng_.between(config_.label_min, config_.label_max));
    if (rng_.below(2) == 1) {
        text += '.';
        text += rng_.draw(symbols, rng_.between(config_.label_min, config_.label_max));
    }
    if (!config_.apex.empty()) {
        text += '.';
        text += config_.apex;
    }
    return parse_name(text);
}

LegitGenerator::LegitGenerator(std::uint64_t seed) : rng_(seed) {}

QueryName LegitGenerator::next() {
    const auto words = wordlist();
    auto word = [&] { return words[rng_.below(words.size())]; };
    const auto tld = kLegitTlds[rng_.below(std::size(kLegitTlds))];

    std::string text;
    switch (rng_.below(6)) {
        case 0: text = fmt::format("{}.{}", word(), tld); break;
        case 1: {
            const auto first = word();
            text = fmt::format("www.{}{}.{}", first, word(), tld);
            break;
        }
        case 2: {
            const auto first = word();
            text = fmt::format("{}-{}.{}", first, word(), tld);
            break;
        }
        case 3: {
            const auto digit = rng_.below(10);
            text = fmt::format("cdn{}.{}.{}", digit, word(), tld);
            break;
        }
        case 4: {
            const auto host = word();
            text = fmt::format("{}.{}.{}", host, word(), tld);
            break;
        }
        default: text = fmt::format("www.{}.{}", word(), tld); break;
    }
    return parse_name(text);
}

std::vector<QueryName> gen_tunnel(const SynthConfig& config) {
    TunnelGenerator gen(config);
    std::vector<QueryName> names;
    names.reserve(config.count);
    for (std::size_t i = 0; i < config.count; ++i) names.push_back(gen.next());
    return names;
}

std::vector<QueryName> gen_legit(std::uint64_t seed, std::size_t count) {
    if (count == 0) throw Error(Errc::InvalidArgument, "count must be at least 1");
    LegitGenerator gen(seed);
    std::vector<QueryName> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) names.push_back(gen.next());
    return names;
}

std::vector<QueryName> gen_repeated_label(const SynthConfig& config, std::string_view fixed_label) {
    config.validate();
    SynthRng rng(config.seed);
    const auto symbols = alphabet(config.encoding);
    std::vector<QueryName> names;
    names.reserve(config.count);
    for (std::size_t i = 0; i < config.count; ++i) {
        std::string text(fixed_label);
        text += '.';
        text += rng.draw(symbols, rng.between(config.label_min, config.label_max));
        if (!config.apex.empty()) {
            text += '.';
            text += config.apex;
        }
        names.push_back(parse_name(text));
    }
    return names;
}

std::span<const std::string_view> wordlist() {
    static const std::vector<std::string_view> words = split_words(detail::kWordListText);
    return words;
}

}  // namespace ngviz
