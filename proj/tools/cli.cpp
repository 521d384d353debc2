#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ngviz/error.hpp"
#include "ngviz/ngram.hpp"
#include "ngviz/pcap.hpp"
#include "ngviz/report.hpp"
#include "ngviz/scoring.hpp"
#include "ngviz/segmentation.hpp"
#include "ngviz/synth.hpp"

namespace ngviz::cli {

namespace {

enum class InputFormat { auto_detect, list, pcap };

struct IngestOptions {
    InputFormat format = InputFormat::auto_detect;
};

struct TableOptions {
    int n = 1;
    bool dedup = true;
    Scope scope = Scope::whole_name;
};

struct AnalyzeOptions {
    std::vector<std::string> inputs;
    std::string fingerprint;
    SplitMode split = SplitMode::by_domain;
    std::size_t window = 100;
    double a = 1.0;
    double b = 1.0;
    std::optional<double> x;
    std::optional<double> y;
    double threshold = kDefaultThreshold;
    SortOrder sort = SortOrder::ascending;
    ReportFormat format = ReportFormat::tsv;
    std::string out;
    std::string chart_dir;
    std::size_t top_k = 40;
};

struct SynthOptions {
    std::string kind = "tunnel";
    std::string emit = "list";
    std::string out;
    SynthConfig config;
};

struct ChartOptions {
    std::string input;
    std::string fingerprint;
    std::string kind = "rank";
    std::string out;
    std::size_t top_k = 40;
};

const std::map<std::string, Scope> kScopes{{"whole_name", Scope::whole_name},
                                           {"subdomain_only", Scope::subdomain_only}};
const std::map<std::string, SplitMode> kSplitModes{{"none", SplitMode::none},
                                                   {"ip", SplitMode::by_ip},
                                                   {"domain", SplitMode::by_domain},
                                                   {"ip+domain", SplitMode::by_ip_and_domain}};
const std::map<std::string, Encoding> kEncodings{
    {"base32", Encoding::base32}, {"base64url", Encoding::base64url}, {"hex", Encoding::hex}};

template <typename T>
std::vector<std::string> keys_of(const std::map<std::string, T>& m) {
    std::vector<std::string> keys;
    for (const auto& kv : m) keys.push_back(kv.first);
    return keys;
}

/// Failures that map to the input-error exit status.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failures that map to the usage exit status.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::OrderMismatch:
        case Errc::InvalidArgument:
            return kExitUsage;
        default:
            return kExitInput;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open {}", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool looks_like_pcap(std::string_view bytes) {
    if (bytes.size() < 4) return false;
    constexpr std::string_view le("\xd4\xc3\xb2\xa1", 4);
    constexpr std::string_view be("\xa1\xb2\xc3\xd4", 4);
    const auto head = bytes.substr(0, 4);
    return head == le || head == be;
}

std::vector<QueryRecord> ingest(const std::string& path, InputFormat format, std::ostream& err) {
    const auto bytes = read_file(path);
    const bool pcap = format == InputFormat::pcap ||
                      (format == InputFormat::auto_detect && looks_like_pcap(bytes));
    std::istringstream in(bytes);
    if (pcap) {
        auto result = read_pcap(in);
        err << fmt::format("{}: {} packets, {} dns, {} skipped\n", path, result.stats.packets_total,
                           result.stats.packets_dns, result.stats.packets_skipped);
        for (const auto& [reason, count] : result.stats.skip_reasons) {
            err << fmt::format("  skipped {}: {}\n", reason, count);
        }
        return std::move(result.records);
    }
    auto result = read_domain_list(in);
    if (result.warnings > 0) {
        err << fmt::format("{}: {} invalid lines skipped\n", path, result.warnings);
    }
    return std::move(result.records);
}

Fingerprint load_fingerprint(const std::string& path, Scope scope) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open fingerprint {}", path));
    return read_fingerprint(in, std::filesystem::path(path).filename().string(), scope);
}

void write_text(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot write {}", path));
    out << text;
    if (!out) throw InputError(fmt::format("failed writing {}", path));
}

std::string file_stem_for(std::string_view key) {
    std::string stem;
    for (char c : key) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '-';
        stem.push_back(keep ? c : '_');
    }
    return stem;
}

void add_table_options(CLI::App& cmd, TableOptions& t) {
    cmd.add_option("--n", t.n, "n-gram order")->check(CLI::Range(1, kMaxOrder))->capture_default_str();
    cmd.add_flag("--dedup,!--no-dedup", t.dedup, "count each distinct name once")
        ->capture_default_str();
    cmd.add_option_function<std::string>(
           "--scope", [&t](const std::string& v) { t.scope = kScopes.at(v); }, "labels to analyse")
        ->check(CLI::IsMember(keys_of(kScopes)))
        ->default_str("whole_name");
}

void add_input_format(CLI::App& cmd, IngestOptions& ingest) {
    cmd.add_option("--input-format", ingest.format, "input file format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, InputFormat>{
            {"auto", InputFormat::auto_detect}, {"list", InputFormat::list}, {"pcap", InputFormat::pcap}}));
}

int cmd_fingerprint(const std::string& input, const std::string& out_path, const std::string& label,
                    const TableOptions& t, const IngestOptions& ing, std::ostream& err) {
    const auto records = ingest(input, ing.format, err);
    Fingerprint fp{build_table(records, t.n, t.dedup, t.scope),
                   label.empty() ? std::filesystem::path(input).filename().string() : label, t.dedup};
    std::ostringstream text;
    write_fingerprint(text, fp);
    write_text(out_path, text.str());
    err << fmt::format("fingerprint: n={} k={} total={}\n", fp.table.order(), fp.table.size(),
                       fp.table.total());
    return kExitClean;
}

MatchParams resolve_params(const AnalyzeOptions& o) {
    MatchParams p;
    p.a = o.a;
    p.b = o.b;
    if (o.x && o.y) {
        p.x = *o.x;
        p.y = *o.y;
    } else if (o.x) {
        p.x = *o.x;
        p.y = 1.0 - *o.x;
    } else if (o.y) {
        p.y = *o.y;
        p.x = 1.0 - *o.y;
    }
    p.validate();
    return p;
}

void write_segment_charts(const AnalyzeOptions& o, const Segment& segment, const Fingerprint& fp,
                          const ScoringOptions& so) {
    const auto table = build_table(segment.records, so.n, so.dedup, so.scope);
    const auto stem = fmt::format("{}-w{}", file_stem_for(segment.key), segment.window_index);
    const std::filesystem::path dir(o.chart_dir);
    write_text((dir / (stem + "-rank.svg")).string(), render_rank_chart(table, fp, o.top_k));
    if (table.size() >= 2) {
        write_text((dir / (stem + "-delta.svg")).string(), render_delta_chart(table));
    }
}

int cmd_analyze(const AnalyzeOptions& o, const TableOptions& t, const IngestOptions& ing,
                std::ostream& out, std::ostream& err) {
    ScoringOptions so;
    so.n = t.n;
    so.dedup = t.dedup;
    so.scope = t.scope;
    so.params = resolve_params(o);
    so.threshold = o.threshold;
    if (o.window == 0) throw UsageError("--window must be at least 1");

    const auto fp = load_fingerprint(o.fingerprint, t.scope);
    if (fp.table.order() != t.n) {
        throw UsageError(fmt::format("fingerprint {} has n={} but --n={}; rebuild it or pass --n {}",
                                     o.fingerprint, fp.table.order(), t.n, fp.table.order()));
    }

    std::vector<QueryRecord> records;
    for (const auto& path : o.inputs) {
        for (auto& rec : ingest(path, ing.format, err)) {
            rec.seq = records.size();
            records.push_back(std::move(rec));
        }
    }

    if (!o.chart_dir.empty()) std::filesystem::create_directories(o.chart_dir);

    std::vector<ScoredSegment> scored;
    std::size_t unscoreable = 0;
    for (const auto& [key, group] : split(records, o.split)) {
        for (const auto& segment : window(key, group, o.window, t.dedup)) {
            try {
                scored.push_back(score_segment(segment, fp, so));
            } catch (const Error& e) {
                if (e.code() != Errc::EmptyTable) throw;
                ++unscoreable;
                continue;
            }
            if (!o.chart_dir.empty()) write_segment_charts(o, segment, fp, so);
        }
    }
    if (unscoreable > 0) {
        err << fmt::format("{} segments produced no n-grams and were not scored\n", unscoreable);
    }

    scored = rank_results(std::move(scored), o.sort);
    const auto rows = to_rows(scored);
    const auto report = render_report(rows, o.format);
    if (o.out.empty()) {
        out << report;
    } else {
        write_text(o.out, report);
    }

    const auto flagged = std::count_if(scored.begin(), scored.end(),
                                       [](const ScoredSegment& s) { return s.flagged; });
    err << fmt::format("{} segments scored, {} below threshold {:.4f}\n", scored.size(), flagged,
                       o.threshold);
    return flagged > 0 ? kExitDetected : kExitClean;
}

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<QueryName> names;
    if (o.kind == "tunnel") {
        names = gen_tunnel(o.config);
    } else {
        names = gen_legit(o.config.seed, o.config.count);
    }

    std::ostringstream buf;
    if (o.emit == "pcap") {
        write_query_pcap(buf, names);
    } else {
        for (const auto& name : names) buf << name.raw() << '\n';
    }
    if (o.out.empty() || o.out == "-") {
        out << buf.str();
    } else {
        write_text(o.out, buf.str());
    }
    err << fmt::format("synth: {} {} names (seed {})\n", names.size(), o.kind, o.config.seed);
    return kExitClean;
}

int cmd_chart(const ChartOptions& o, const TableOptions& t, const IngestOptions& ing,
              std::ostream& out, std::ostream& err) {
    const auto records = ingest(o.input, ing.format, err);
    const auto table = build_table(records, t.n, t.dedup, t.scope);
    std::string svg;
    if (o.kind == "delta") {
        svg = render_delta_chart(table);
    } else {
        if (o.fingerprint.empty()) throw UsageError("--fingerprint is required for rank charts");
        const auto fp = load_fingerprint(o.fingerprint, t.scope);
        if (fp.table.order() != t.n) {
            throw UsageError(fmt::format("fingerprint has n={} but --n={}", fp.table.order(), t.n));
        }
        svg = render_rank_chart(table, fp, o.top_k);
    }
    if (o.out.empty() || o.out == "-") {
        out << svg;
    } else {
        write_text(o.out, svg);
    }
    return kExitClean;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"n-gram frequency analysis of DNS query names for tunnel detection", "ngviz"};
    app.require_subcommand(1);

    TableOptions table_opts;
    IngestOptions ingest_opts;

    // fingerprint
    std::string fp_input;
    std::string fp_out;
    std::string fp_label;
    auto* fp_cmd = app.add_subcommand("fingerprint", "build a fingerprint from legitimate traffic");
    fp_cmd->add_option("input", fp_input, "domain list or pcap file")->required();
    fp_cmd->add_option("--out", fp_out, "fingerprint file to write")->required();
    fp_cmd->add_option("--label", fp_label, "description of the corpus");
    add_table_options(*fp_cmd, table_opts);
    add_input_format(*fp_cmd, ingest_opts);

    // analyze
    AnalyzeOptions an;
    auto* an_cmd = app.add_subcommand("analyze", "score traffic segments against a fingerprint");
    an_cmd->add_option("inputs", an.inputs, "domain lists or pcap files")->required();
    an_cmd->add_option("--fingerprint", an.fingerprint, "fingerprint file")->required();
    an_cmd->add_option_function<std::string>(
              "--split-by", [&an](const std::string& v) { an.split = kSplitModes.at(v); }, "segment key")
        ->check(CLI::IsMember(keys_of(kSplitModes)))
        ->default_str("domain");
    an_cmd->add_option("--window", an.window, "unique names per window")->capture_default_str();
    an_cmd->add_option("--a", an.a, "rank score exponent")->check(CLI::NonNegativeNumber)->capture_default_str();
    an_cmd->add_option("--b", an.b, "frequency score exponent")->check(CLI::NonNegativeNumber)->capture_default_str();
    an_cmd->add_option("--x", an.x, "rank score weight (default 0.5)")->check(CLI::Range(0.0, 1.0));
    an_cmd->add_option("--y", an.y, "frequency score weight (default 1 - x)")->check(CLI::Range(0.0, 1.0));
    an_cmd->add_option("--threshold", an.threshold, "flag segments scoring below this")->capture_default_str();
    an_cmd->add_option("--sort", an.sort, "report order by total match")
        ->transform(CLI::CheckedTransformer(std::map<std::string, SortOrder>{
            {"ascending", SortOrder::ascending}, {"descending", SortOrder::descending}}));
    an_cmd->add_option("--format", an.format, "report format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ReportFormat>{
            {"tsv", ReportFormat::tsv}, {"jsonl", ReportFormat::json_lines},
            {"json_lines", ReportFormat::json_lines}}));
    an_cmd->add_option("--out", an.out, "write the report here instead of standard output");
    an_cmd->add_option("--chart-dir", an.chart_dir, "write per-segment SVG charts into this directory");
    an_cmd->add_option("--top-k", an.top_k, "ranks shown in rank charts")->check(CLI::PositiveNumber);
    add_table_options(*an_cmd, table_opts);
    add_input_format(*an_cmd, ingest_opts);

    // synth
    SynthOptions sy;
    auto* sy_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    sy_cmd->add_option("--kind", sy.kind, "corpus kind")
        ->check(CLI::IsMember({"tunnel", "legit"}))
        ->capture_default_str();
    sy_cmd->add_option("--count", sy.config.count, "number of names")->capture_default_str();
    sy_cmd->add_option("--seed", sy.config.seed, "PRNG seed")->capture_default_str();
    sy_cmd->add_option("--apex", sy.config.apex, "tunnel domain")->capture_default_str();
    sy_cmd->add_option_function<std::string>(
              "--encoding", [&sy](const std::string& v) { sy.config.encoding = kEncodings.at(v); },
              "tunnel label alphabet")
        ->check(CLI::IsMember(keys_of(kEncodings)))
        ->default_str("base32");
    sy_cmd->add_option("--label-min", sy.config.label_min, "shortest tunnel label")->capture_default_str();
    sy_cmd->add_option("--label-max", sy.config.label_max, "longest tunnel label")->capture_default_str();
    sy_cmd->add_option("--emit", sy.emit, "output format")
        ->check(CLI::IsMember({"list", "pcap"}))
        ->capture_default_str();
    sy_cmd->add_option("--out", sy.out, "output file (default standard output)");

    // chart
    ChartOptions ch;
    auto* ch_cmd = app.add_subcommand("chart", "render an SVG chart for one input");
    ch_cmd->add_option("input", ch.input, "domain list or pcap file")->required();
    ch_cmd->add_option("--fingerprint", ch.fingerprint, "fingerprint file (rank charts)");
    ch_cmd->add_option("--kind", ch.kind, "chart kind")
        ->check(CLI::IsMember({"rank", "delta"}))
        ->capture_default_str();
    ch_cmd->add_option("--out", ch.out, "SVG file (default standard output)");
    ch_cmd->add_option("--top-k", ch.top_k, "ranks shown")->check(CLI::PositiveNumber)->capture_default_str();
    add_table_options(*ch_cmd, table_opts);
    add_input_format(*ch_cmd, ingest_opts);

    std::vector<const char*> argv{"ngviz"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitClean : kExitUsage;
    }

    try {
        if (*fp_cmd) return cmd_fingerprint(fp_input, fp_out, fp_label, table_opts, ingest_opts, err);
        if (*an_cmd) return cmd_analyze(an, table_opts, ingest_opts, out, err);
        if (*sy_cmd) return cmd_synth(sy, out, err);
        if (*ch_cmd) return cmd_chart(ch, table_opts, ingest_opts, out, err);
    } catch (const UsageError& e) {
        err << "ngviz: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "ngviz: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        err << "ngviz: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "ngviz: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace ngviz::cli
