#include <doctest.h>

#include <nlohmann/json.hpp>

#include "ngviz/error.hpp"
#include "ngviz/report.hpp"
#include "ngviz/synth.hpp"
#include "support.hpp"
#include "svg_check.hpp"

using namespace ngviz;

namespace {

ReportRow row(std::string key, std::size_t idx, double total, bool flagged) {
    return ReportRow{std::move(key), idx, 31, 0.5, 1.0, total, flagged};
}

NgramTable unigrams(const std::vector<QueryName>& names, Scope scope = Scope::whole_name) {
    return build_table(std::span<const QueryName>(names), 1, true, scope);
}

NgramTable from_counts(std::initializer_list<std::pair<const char*, std::uint64_t>> counts) {
    NgramTable::Counts c;
    for (const auto& [g, n] : counts) c[g] = n;
    return NgramTable(1, Scope::whole_name, c);
}

// 200 names sharing the fixed 8-byte label, plus random distinguishing bytes.
std::vector<QueryName> repeated_corpus(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.count = 200;
    cfg.apex = "example.com";
    cfg.label_min = 4;
    cfg.label_max = 8;
    return gen_repeated_label(cfg, "mailsrvq");
}

std::vector<QueryName> random_corpus(std::uint64_t seed) {
    // Same shape, but the first label is random as well.
    std::vector<QueryName> out;
    SynthRng rng(seed ^ 0x5eed);
    for (std::size_t i = 0; i < 200; ++i) {
        out.push_back(parse_name(rng.draw(alphabet(Encoding::base32), 8) + "." +
                                 rng.draw(alphabet(Encoding::base32), rng.between(4, 8)) + ".example.com"));
    }
    return out;
}

}  // namespace

TEST_CASE("tsv report") {
    CHECK(render_report({}, ReportFormat::tsv) ==
          "key\twindow_index\tk_input\trank_match\tfreq_match\ttotal_match\tflagged\n");

    const std::vector<ReportRow> rows = {row("evil.com", 0, 0.75, false), row("a\tb", 2, 0.123456, true)};
    CHECK(render_report(rows, ReportFormat::tsv) ==
          "key\twindow_index\tk_input\trank_match\tfreq_match\ttotal_match\tflagged\n"
          "evil.com\t0\t31\t0.5000\t1.0000\t0.7500\tfalse\n"
          "a\\x09b\t2\t31\t0.5000\t1.0000\t0.1235\ttrue\n");
}

TEST_CASE("json lines report") {
    CHECK(render_report({}, ReportFormat::json_lines).empty());

    const std::vector<ReportRow> rows = {row("evil.com", 0, 0.75, false), row("q\"\\\x01", 4, 0.0, true)};
    const auto text = render_report(rows, ReportFormat::json_lines);
    CHECK(text.ends_with("\n"));
    std::istringstream in(text);
    std::string line;
    std::vector<nlohmann::json> parsed;
    while (std::getline(in, line)) parsed.push_back(nlohmann::json::parse(line));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0]["key"] == "evil.com");
    CHECK(parsed[0]["window_index"] == 0);
    CHECK(parsed[0]["k_input"] == 31);
    CHECK(parsed[0]["total_match"].get<double>() == 0.75);
    CHECK(parsed[0]["flagged"] == false);
    CHECK(parsed[1]["key"] == "q\"\\x5c\\x01");
    CHECK(parsed[1]["flagged"] == true);
    CHECK(text.substr(0, text.find('\n')) ==
          "{\"key\":\"evil.com\",\"window_index\":0,\"k_input\":31,\"rank_match\":0.5000,"
          "\"freq_match\":1.0000,\"total_match\":0.7500,\"flagged\":false}");

    // Field order follows the struct.
    std::vector<std::string> keys;
    const auto ordered = nlohmann::ordered_json::parse(text.substr(0, text.find('\n')));
    for (const auto& [k, v] : ordered.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"key", "window_index", "k_input", "rank_match", "freq_match",
                                           "total_match", "flagged"});
}

TEST_CASE("to_rows carries scored segments over") {
    ScoredSegment s;
    s.key = "k";
    s.window_index = 7;
    s.score = MatchScore{0.25, 0.5, 0.375, 12, 30};
    s.flagged = true;
    const auto rows = to_rows(std::vector<ScoredSegment>{s});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].key == "k");
    CHECK(rows[0].window_index == 7);
    CHECK(rows[0].k_input == 12);
    CHECK(rows[0].rank_match == 0.25);
    CHECK(rows[0].freq_match == 0.5);
    CHECK(rows[0].total_match == 0.375);
    CHECK(rows[0].flagged);
}

TEST_CASE("rank chart") {
    const auto legit = unigrams(gen_legit(1, 2000));
    const Fingerprint fp{legit, "legit <seed 1>", true};

    SUBCASE("identical tables give coincident series") {
        const auto svg = test::inspect_svg(render_rank_chart(legit, fp, 20));
        REQUIRE_MESSAGE(svg.well_formed, svg.error);
        CHECK(svg.width == 800);
        CHECK(svg.height == 480);
        const auto* a = test::series(svg, "series-fingerprint");
        const auto* b = test::series(svg, "series-input");
        REQUIRE(a);
        REQUIRE(b);
        REQUIRE(a->size() == 20);
        REQUIRE(b->size() == 20);
        for (std::size_t i = 0; i < a->size(); ++i) {
            CHECK((*a)[i].x == (*b)[i].x);
            CHECK((*a)[i].y == (*b)[i].y);
        }
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("uniform-random input is flatter") {
        SynthConfig cfg;
        cfg.seed = 2;
        cfg.count = 2000;
        cfg.apex = "";
        const auto tunnel = unigrams(gen_tunnel(cfg));
        const auto svg = test::inspect_svg(render_rank_chart(tunnel, fp, 40));
        REQUIRE(svg.well_formed);
        const auto* f = test::series(svg, "series-fingerprint");
        const auto* t = test::series(svg, "series-input");
        REQUIRE(f);
        REQUIRE(t);
        // Heights measured up from the x axis at y = 480 - 60.
        const double base = 480 - 60;
        CHECK(base - t->front().y < 0.5 * (base - f->front().y));
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("top_k beyond the table is clamped") {
        const auto small = from_counts({{"a", 3}, {"b", 1}});
        const auto svg = test::inspect_svg(render_rank_chart(small, fp, 1000));
        REQUIRE(svg.well_formed);
        CHECK(test::series(svg, "series-input")->size() == 2);
        CHECK(test::series(svg, "series-fingerprint")->size() == legit.size());
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("top_k of one") {
        const auto svg = test::inspect_svg(render_rank_chart(legit, fp, 1));
        REQUIRE(svg.well_formed);
        CHECK(test::series(svg, "series-input")->size() == 1);
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("markup in labels is escaped") {
        const auto text = render_rank_chart(legit, fp, 5);
        CHECK(text.find("legit &lt;seed 1&gt;") != std::string::npos);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(render_rank_chart(legit, fp, 0), Error);
        const NgramTable empty(1, Scope::whole_name, {});
        try {
            render_rank_chart(empty, fp, 10);
            FAIL("expected TooFewNgrams");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::TooFewNgrams);
        }
    }
    SUBCASE("deterministic") {
        CHECK(render_rank_chart(legit, fp, 30) == render_rank_chart(legit, fp, 30));
    }
}

TEST_CASE("delta spikes") {
    SUBCASE("equal counts have none") {
        const auto t = from_counts({{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}});
        CHECK(delta_spikes(t).empty());
        const auto svg = test::inspect_svg(render_delta_chart(t));
        REQUIRE(svg.well_formed);
        CHECK(std::count(svg.rect_classes.begin(), svg.rect_classes.end(), "delta") == 3);
        CHECK(svg.spike_markers == 0);
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("two n-grams give a single bar") {
        const auto t = from_counts({{"a", 9}, {"b", 1}});
        const auto svg = test::inspect_svg(render_delta_chart(t));
        REQUIRE(svg.well_formed);
        CHECK(std::count_if(svg.rect_classes.begin(), svg.rect_classes.end(),
                            [](const std::string& c) { return c == "delta" || c == "spike"; }) == 1);
        CHECK(test::inside_viewbox(svg));
        CHECK_THROWS_AS(render_delta_chart(from_counts({{"a", 1}})), Error);
    }
    SUBCASE("a label shared by many names spikes") {
        const auto t = unigrams(repeated_corpus(11), Scope::subdomain_only);
        const auto deltas = freq_deltas(t);
        auto sorted = deltas;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        CHECK(sorted.back() >= 3 * median);
        CHECK_FALSE(delta_spikes(t).empty());
        const auto svg = test::inspect_svg(render_delta_chart(t));
        REQUIRE(svg.well_formed);
        CHECK(svg.spike_markers == delta_spikes(t).size());
        CHECK(svg.spike_markers >= 1);
        CHECK(test::inside_viewbox(svg));
    }
    SUBCASE("random names of the same shape do not") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto t = unigrams(random_corpus(seed), Scope::subdomain_only);
            CHECK(delta_spikes(t).empty());
        }
    }
    SUBCASE("spike indices satisfy both thresholds") {
        const auto t = unigrams(repeated_corpus(12), Scope::subdomain_only);
        const auto deltas = freq_deltas(t);
        auto sorted = deltas;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        for (auto i : delta_spikes(t)) {
            CHECK(deltas[i] > 3 * median);
            const double hi = static_cast<double>(t.ranking()[i].count);
            const double lo = static_cast<double>(t.ranking()[i + 1].count);
            CHECK(hi - lo > 3 * std::sqrt(hi + lo));
        }
    }
    SUBCASE("deterministic") {
        const auto t = unigrams(repeated_corpus(13), Scope::subdomain_only);
        CHECK(render_delta_chart(t) == render_delta_chart(t));
    }
}

TEST_CASE("charts stay inside the viewBox on random tables") {
    test::Gen gen(77);
    for (int i = 0; i < 40; ++i) {
        std::vector<QueryName> names;
        for (std::size_t j = 0, c = gen.uniform(1, 60); j < c; ++j) names.push_back(parse_name(gen.hostname()));
        const auto t = unigrams(names);
        const Fingerprint fp{unigrams(gen_legit(i, 50)), "fp", true};
        const auto rank = test::inspect_svg(render_rank_chart(t, fp, gen.uniform(1, 60)));
        REQUIRE(rank.well_formed);
        CHECK(test::inside_viewbox(rank));
        if (t.size() >= 2) {
            const auto delta = test::inspect_svg(render_delta_chart(t));
            REQUIRE(delta.well_formed);
            CHECK(test::inside_viewbox(delta));
        }
    }
}
