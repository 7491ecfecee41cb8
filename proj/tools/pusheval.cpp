// pusheval: batch evaluation toolkit for push-notification streams.
// Subcommands: evaluate, sweep-n, leave-one-out, audit-epoch, compare-modes,
// validate, gen-synth. Exit codes: 0 success, 1 usage, 2 validation failure,
// 3 data error. Output is byte-deterministic for identical inputs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pusheval/ingest.hpp"
#include "pusheval/metrics.hpp"
#include "pusheval/model.hpp"
#include "pusheval/parallel.hpp"
#include "pusheval/reusability.hpp"
#include "pusheval/rng.hpp"
#include "pusheval/strategies.hpp"
#include "pusheval/synth.hpp"

namespace fs = std::filesystem;
using namespace pusheval;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GtOptions {
    std::string qrels;
    std::string clusters;
    std::vector<std::string> epochs;  // first is the base, rest are merged
};

struct WindowOptions {
    std::int64_t start_epoch = 0;
    std::int64_t window_seconds = 86400;
    int windows = 0;
    int cap = 10;
    std::string mode = "strict";
    int year = 0;  // 0 = all variants; 2016 = {0,1}; 2017 = {1,p}
};

void add_gt_options(CLI::App* cmd, GtOptions& o) {
    cmd->add_option("--qrels", o.qrels, "Relevance judgments file")->required();
    cmd->add_option("--clusters", o.clusters, "Cluster assignments file")->required();
    cmd->add_option("--epoch", o.epochs,
                    "Creation epoch file(s); extra files are merged, base wins")
        ->required();
}

void add_window_options(CLI::App* cmd, WindowOptions& o) {
    cmd->add_option("--start-epoch", o.start_epoch, "Evaluation period start (epoch seconds)")
        ->required();
    cmd->add_option("--window-seconds", o.window_seconds, "Window length in seconds");
    cmd->add_option("--windows", o.windows, "Number of evaluation windows")->required();
    cmd->add_option("--cap", o.cap, "Daily push limit N per profile");
    cmd->add_option("--mode", o.mode, "strict or official-2016");
    cmd->add_option("--year", o.year, "Metric preset: 2016 (EG/nCG -0,-1) or 2017 (-1,-p)");
}

EvalConfig build_config(const WindowOptions& o) {
    if (o.windows < 1) throw UsageError("--windows must be at least 1");
    if (o.window_seconds < 1) throw UsageError("--window-seconds must be at least 1");
    if (o.cap < 1) throw UsageError("--cap must be at least 1");
    auto mode = mode_from_string(o.mode);
    if (!mode) throw UsageError("--mode must be 'strict' or 'official-2016'");
    EvalConfig cfg;
    cfg.windowing = {o.start_epoch, o.window_seconds, o.windows};
    cfg.cap = o.cap;
    cfg.mode = *mode;
    if (o.year == 2016) {
        cfg.eg_variants = {Variant::Zero, Variant::One};
        cfg.ncg_variants = {Variant::Zero, Variant::One};
    } else if (o.year == 2017) {
        cfg.eg_variants = {Variant::One, Variant::Prop};
        cfg.ncg_variants = {Variant::One, Variant::Prop};
    } else if (o.year != 0) {
        throw UsageError("--year must be 2016 or 2017");
    }
    return cfg;
}

bool metric_available(const EvalConfig& cfg, const std::string& key) {
    for (Variant v : cfg.eg_variants)
        if (eg_key(v) == key) return true;
    for (Variant v : cfg.ncg_variants)
        if (ncg_key(v) == key) return true;
    for (double a : cfg.alphas)
        if (gmp_key(a) == key) return true;
    return key == "Latency-mean" || key == "Latency-median";
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read file: " + path);
    return in;
}

void print_diagnostics(const std::vector<ParseDiagnostic>& diags) {
    for (const auto& d : diags)
        std::cerr << "warning: " << d.file << ':' << d.line << ": "
                  << to_string(d.kind) << ": " << d.message << '\n';
}

GroundTruth load_ground_truth(const GtOptions& o, std::size_t* diag_count = nullptr) {
    std::size_t count = 0;
    GroundTruth gt;
    {
        auto in = open_input(o.qrels);
        auto res = parse_qrels(in, o.qrels);
        print_diagnostics(res.diagnostics);
        count += res.diagnostics.size();
        gt.judgments = std::move(res.judgments);
    }
    {
        auto in = open_input(o.clusters);
        auto res = parse_clusters(in, o.clusters);
        print_diagnostics(res.diagnostics);
        count += res.diagnostics.size();
        gt.clusters = std::move(res.clusters);
    }
    for (std::size_t i = 0; i < o.epochs.size(); ++i) {
        auto in = open_input(o.epochs[i]);
        auto res = parse_epochs(in, o.epochs[i]);
        print_diagnostics(res.diagnostics);
        count += res.diagnostics.size();
        if (i == 0) {
            gt.epochs = std::move(res.epochs);
        } else {
            std::vector<ParseDiagnostic> merge_diags;
            gt.epochs = merge_epochs(gt.epochs, res.epochs, &merge_diags);
            print_diagnostics(merge_diags);
            count += merge_diags.size();
        }
    }
    if (diag_count) *diag_count = count;
    return gt;
}

// Returns 2 (validation failure) after printing violations, or 0.
int check_ground_truth(const GroundTruth& gt) {
    auto violations = validate_ground_truth(gt);
    for (const auto& v : violations)
        std::cerr << "violation: " << v.rule << " profile=" << v.profile
                  << " tweet=" << v.tweet << ": " << v.detail << '\n';
    return violations.empty() ? 0 : 2;
}

std::vector<Run> load_runs(const std::vector<std::string>& paths, bool reject_dup_tags) {
    std::vector<Run> runs;
    std::set<std::string> tags;
    for (const auto& path : paths) {
        auto in = open_input(path);
        auto res = parse_run(in, fs::path(path).stem().string(), path);
        print_diagnostics(res.diagnostics);
        if (reject_dup_tags && !tags.insert(res.run.tag).second)
            throw UsageError("duplicate run tag: " + res.run.tag);
        runs.push_back(std::move(res.run));
    }
    return runs;
}

std::string sanitize_filename(std::string s) {
    for (char& c : s)
        if (c == '/' || c == '\\') c = '_';
    return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + path.string());
    out << text;
}

int hardware_jobs(int requested) {
    if (requested > 0) return requested;
    unsigned n = std::thread::hardware_concurrency();
    return n > 0 ? static_cast<int>(n) : 1;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    GtOptions gt;
    WindowOptions window;
    std::vector<std::string> runs;
    std::string format = "tsv";
    std::string out;
    int jobs = 0;
};

int do_evaluate(const EvaluateOptions& o) {
    if (o.format != "tsv" && o.format != "json")
        throw UsageError("--format must be 'tsv' or 'json'");
    EvalConfig cfg = build_config(o.window);
    GroundTruth gt = load_ground_truth(o.gt);
    if (int rc = check_ground_truth(gt)) return rc;
    std::vector<Run> runs = load_runs(o.runs, false);

    std::vector<ScoreReport> reports(runs.size());
    parallel_for(runs.size(), hardware_jobs(o.jobs), [&](std::size_t i) {
        reports[i] = evaluate_run(runs[i], gt, cfg);
    });

    ReportFormat fmt = o.format == "tsv" ? ReportFormat::Tsv : ReportFormat::Json;
    for (const auto& rep : reports)
        for (const auto& w : rep.warnings)
            std::cerr << "warning: run " << rep.run_tag << ": " << w << '\n';
    if (o.out.empty()) {
        for (const auto& rep : reports) write_report(std::cout, rep, fmt);
    } else {
        fs::create_directories(o.out);
        for (const auto& rep : reports) {
            std::ostringstream text;
            write_report(text, rep, fmt);
            fs::path file = fs::path(o.out) / (sanitize_filename(rep.run_tag) +
                                               (fmt == ReportFormat::Tsv ? ".tsv" : ".json"));
            write_text_file(file, text.str());
        }
    }
    return 0;
}

// ----------------------------------------------------------------- sweep-n

struct SweepOptions {
    GtOptions gt;
    WindowOptions window;
    std::vector<std::string> runs;
    std::string strategy;
    std::string metric = "EG-1";
    int n_min = 1;
    int n_max = 0;  // 0 = cap
    std::uint64_t seed = 1;
    int draws = 100;
    std::string gold_padding = "always";
    std::string out;
    int jobs = 0;
};

int do_sweep(const SweepOptions& o) {
    EvalConfig cfg = build_config(o.window);
    auto strategy = strategy_from_string(o.strategy);
    if (!strategy) throw UsageError("--strategy must be first, gold or random");
    if (!metric_available(cfg, o.metric))
        throw UsageError("unknown metric key: " + o.metric);
    GoldPadding padding;
    if (o.gold_padding == "always")
        padding = GoldPadding::Always;
    else if (o.gold_padding == "never")
        padding = GoldPadding::Never;
    else
        throw UsageError("--gold-padding must be 'always' or 'never'");
    int n_max = o.n_max == 0 ? cfg.cap : o.n_max;
    if (o.n_min < 1 || o.n_min > n_max || n_max > cfg.cap)
        throw UsageError("need 1 <= --n-min <= --n-max <= --cap");

    GroundTruth gt = load_ground_truth(o.gt);
    if (int rc = check_ground_truth(gt)) return rc;
    std::vector<Run> runs = load_runs(o.runs, true);
    if (runs.empty()) throw UsageError("sweep-n needs at least one run");

    SweepResult result = sweep(runs, gt, cfg, *strategy, o.metric, o.n_min, n_max,
                               o.seed, o.draws, padding, hardware_jobs(o.jobs));
    std::ostringstream text;
    write_sweep_tsv(text, result);
    if (o.out.empty())
        std::cout << text.str();
    else
        write_text_file(o.out, text.str());
    return 0;
}

// ----------------------------------------------------------- leave-one-out

struct LooOptions {
    GtOptions gt;
    WindowOptions window;
    std::vector<std::string> runs;
    std::string metric = "EG-1";
    std::string out;
    int jobs = 0;
};

int do_loo(const LooOptions& o) {
    EvalConfig cfg = build_config(o.window);
    if (!metric_available(cfg, o.metric))
        throw UsageError("unknown metric key: " + o.metric);
    GroundTruth gt = load_ground_truth(o.gt);
    if (int rc = check_ground_truth(gt)) return rc;
    std::vector<Run> runs = load_runs(o.runs, true);
    if (runs.size() < 2) throw UsageError("leave-one-out needs at least two runs");

    LooResult result = leave_one_out(runs, gt, cfg, o.metric, hardware_jobs(o.jobs));
    std::ostringstream text;
    write_loo_tsv(text, result);
    if (o.out.empty())
        std::cout << text.str();
    else
        write_text_file(o.out, text.str());
    return 0;
}

// ------------------------------------------------------------- audit-epoch

struct AuditOptions {
    GtOptions gt;
    std::vector<std::string> runs;
    std::string out;
};

int do_audit(const AuditOptions& o) {
    GroundTruth gt = load_ground_truth(o.gt);
    std::vector<Run> runs = load_runs(o.runs, false);
    EpochAudit audit = audit_epoch(gt, runs);
    std::ostringstream text;
    write_audit_tsv(text, audit);
    if (o.out.empty())
        std::cout << text.str();
    else
        write_text_file(o.out, text.str());
    return audit.clean() ? 0 : 3;
}

// ----------------------------------------------------------- compare-modes

struct CompareOptions {
    GtOptions gt;
    WindowOptions window;
    std::vector<std::string> runs;
    std::string metric = "EG-1";
    std::string out;
    int jobs = 0;
};

int do_compare(const CompareOptions& o) {
    EvalConfig cfg = build_config(o.window);
    if (!metric_available(cfg, o.metric))
        throw UsageError("unknown metric key: " + o.metric);
    GroundTruth gt = load_ground_truth(o.gt);
    if (int rc = check_ground_truth(gt)) return rc;
    std::vector<Run> runs = load_runs(o.runs, true);
    if (runs.empty()) throw UsageError("compare-modes needs at least one run");

    auto rows = compare_modes(runs, gt, cfg, o.metric, hardware_jobs(o.jobs));
    std::ostringstream text;
    write_modes_tsv(text, rows);
    if (o.out.empty())
        std::cout << text.str();
    else
        write_text_file(o.out, text.str());
    return 0;
}

// ---------------------------------------------------------------- validate

int do_validate(const GtOptions& o) {
    std::size_t diag_count = 0;
    GroundTruth gt = load_ground_truth(o, &diag_count);
    auto violations = validate_ground_truth(gt);
    for (const auto& v : violations)
        std::cout << "violation\t" << v.rule << '\t' << v.profile << '\t' << v.tweet
                  << '\t' << v.detail << '\n';
    if (violations.empty() && diag_count == 0) {
        std::cout << "clean\n";
        return 0;
    }
    std::cout << "#violations\t" << violations.size() << "\t#diagnostics\t"
              << diag_count << '\n';
    return 2;
}

// --------------------------------------------------------------- gen-synth

struct GenOptions {
    std::uint64_t seed = 1;
    std::string out_dir;
    int profiles = 10;
    int windows = 10;
    std::int64_t start_epoch = 0;
    std::int64_t window_seconds = 86400;
    int systems = 1;
    int cap = 10;
    double silent_rate = 0.2;
    double background_rate = 0.5;
    int min_clusters = 2;
    int max_clusters = 6;
    int min_tweets = 1;
    int max_tweets = 4;
};

int do_gen_synth(const GenOptions& o) {
    if (o.profiles < 1 || o.windows < 1 || o.systems < 1 || o.cap < 1)
        throw UsageError("--profiles, --windows, --systems and --cap must be positive");
    if (o.min_clusters < 0 || o.min_clusters > o.max_clusters ||
        o.min_tweets < 1 || o.min_tweets > o.max_tweets)
        throw UsageError("cluster/tweet ranges must be non-empty");
    if (o.silent_rate < 0 || o.silent_rate > 1 || o.background_rate < 0 ||
        o.background_rate > 1)
        throw UsageError("rates must lie in [0, 1]");

    SynthSpec spec;
    spec.seed = o.seed;
    spec.profiles = o.profiles;
    spec.windows = o.windows;
    spec.start_epoch = o.start_epoch;
    spec.window_seconds = o.window_seconds;
    spec.clusters_per_profile = {o.min_clusters, o.max_clusters};
    spec.tweets_per_cluster = {o.min_tweets, o.max_tweets};
    spec.silent_rate = o.silent_rate;
    spec.background_rate = o.background_rate;

    EvalConfig cfg;
    cfg.windowing = {o.start_epoch, o.window_seconds, o.windows};
    cfg.cap = o.cap;

    GroundTruth gt = gen_ground_truth(spec);

    fs::create_directories(o.out_dir);
    fs::path dir(o.out_dir);
    {
        std::ostringstream text;
        write_qrels(text, gt.judgments);
        write_text_file(dir / "qrels.txt", text.str());
    }
    {
        std::ostringstream text;
        write_clusters(text, gt.clusters);
        write_text_file(dir / "clusters.txt", text.str());
    }
    {
        std::ostringstream text;
        write_epochs(text, gt.epochs);
        write_text_file(dir / "epochs.txt", text.str());
    }

    std::ostringstream manifest;
    manifest << "{\n  \"seed\": " << o.seed << ",\n  \"profiles\": " << o.profiles
             << ",\n  \"windows\": " << o.windows
             << ",\n  \"start_epoch\": " << o.start_epoch
             << ",\n  \"window_seconds\": " << o.window_seconds
             << ",\n  \"cap\": " << o.cap
             << ",\n  \"clusters_per_profile\": [" << o.min_clusters << ", "
             << o.max_clusters << "]"
             << ",\n  \"tweets_per_cluster\": [" << o.min_tweets << ", "
             << o.max_tweets << "]"
             << ",\n  \"silent_rate\": " << format_fixed(o.silent_rate)
             << ",\n  \"background_rate\": " << format_fixed(o.background_rate)
             << ",\n  \"systems\": [";
    for (int i = 0; i < o.systems; ++i) {
        Rng rng(mix_seed({o.seed, 0x5157ull, static_cast<std::uint64_t>(i)}));
        SystemSpec sys;
        char tag[16];
        std::snprintf(tag, sizeof tag, "sys%02d", i + 1);
        sys.tag = tag;
        sys.seed = rng.next();
        sys.precision = 0.30 + 0.65 * rng.unit();
        sys.verbosity = {1, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(o.cap)))};
        sys.latency = {0, static_cast<int>(std::max<std::int64_t>(1, o.window_seconds / 10))};
        sys.silence_respect = 0.5 + 0.5 * rng.unit();

        Run run = gen_run(gt, sys, cfg);
        std::ostringstream text;
        write_run(text, run);
        write_text_file(dir / ("run_" + sys.tag + ".txt"), text.str());

        manifest << (i ? ",\n    " : "\n    ") << "{\"tag\": \"" << sys.tag
                 << "\", \"seed\": " << sys.seed
                 << ", \"precision\": " << format_fixed(sys.precision)
                 << ", \"verbosity\": [" << sys.verbosity.lo << ", "
                 << sys.verbosity.hi << "]"
                 << ", \"latency\": [" << sys.latency.lo << ", " << sys.latency.hi
                 << "]"
                 << ", \"silence_respect\": " << format_fixed(sys.silence_respect)
                 << ", \"file\": \"run_" + sys.tag + ".txt\"}";
    }
    manifest << "\n  ],\n  \"files\": {\"qrels\": \"qrels.txt\", "
                "\"clusters\": \"clusters.txt\", \"epochs\": \"epochs.txt\"}\n}\n";
    write_text_file(dir / "manifest.json", manifest.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch evaluation toolkit for push-notification streams"};
    app.require_subcommand(1);

    EvaluateOptions eval_opts;
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Score runs against the ground truth, one report per run");
    add_gt_options(eval_cmd, eval_opts.gt);
    add_window_options(eval_cmd, eval_opts.window);
    eval_cmd->add_option("--run", eval_opts.runs, "Run file(s)")->required();
    eval_cmd->add_option("--format", eval_opts.format, "tsv or json");
    eval_cmd->add_option("--out", eval_opts.out,
                         "Output directory (default: reports to stdout)");
    eval_cmd->add_option("--jobs", eval_opts.jobs, "Worker threads (0 = auto)");

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand(
        "sweep-n", "Evaluate restricted runs over a range of daily budgets");
    add_gt_options(sweep_cmd, sweep_opts.gt);
    add_window_options(sweep_cmd, sweep_opts.window);
    sweep_cmd->add_option("--run", sweep_opts.runs, "Run file(s)")->required();
    sweep_cmd->add_option("--strategy", sweep_opts.strategy, "first, gold or random")
        ->required();
    sweep_cmd->add_option("--metric", sweep_opts.metric, "Aggregate metric key");
    sweep_cmd->add_option("--n-min", sweep_opts.n_min, "Smallest budget");
    sweep_cmd->add_option("--n-max", sweep_opts.n_max, "Largest budget (0 = cap)");
    sweep_cmd->add_option("--seed", sweep_opts.seed, "Random strategy seed");
    sweep_cmd->add_option("--draws", sweep_opts.draws, "Random draws per run");
    sweep_cmd->add_option("--gold-padding", sweep_opts.gold_padding,
                          "Pad gold groups to n: always or never");
    sweep_cmd->add_option("--out", sweep_opts.out, "Output file (default stdout)");
    sweep_cmd->add_option("--jobs", sweep_opts.jobs, "Worker threads (0 = auto)");

    LooOptions loo_opts;
    auto* loo_cmd = app.add_subcommand(
        "leave-one-out", "Re-rank every run against ground truth without its unique tweets");
    add_gt_options(loo_cmd, loo_opts.gt);
    add_window_options(loo_cmd, loo_opts.window);
    loo_cmd->add_option("--run", loo_opts.runs, "Run files (two or more)")->required();
    loo_cmd->add_option("--metric", loo_opts.metric, "Aggregate metric key");
    loo_cmd->add_option("--out", loo_opts.out, "Output file (default stdout)");
    loo_cmd->add_option("--jobs", loo_opts.jobs, "Worker threads (0 = auto)");

    AuditOptions audit_opts;
    auto* audit_cmd = app.add_subcommand(
        "audit-epoch", "List pushed tweets missing from the epoch map");
    add_gt_options(audit_cmd, audit_opts.gt);
    audit_cmd->add_option("--run", audit_opts.runs, "Run file(s)")->required();
    audit_cmd->add_option("--out", audit_opts.out, "Output file (default stdout)");

    CompareOptions compare_opts;
    auto* compare_cmd = app.add_subcommand(
        "compare-modes", "Score every run under strict and official-2016 modes");
    add_gt_options(compare_cmd, compare_opts.gt);
    add_window_options(compare_cmd, compare_opts.window);
    compare_cmd->add_option("--run", compare_opts.runs, "Run file(s)")->required();
    compare_cmd->add_option("--metric", compare_opts.metric, "Aggregate metric key");
    compare_cmd->add_option("--out", compare_opts.out, "Output file (default stdout)");
    compare_cmd->add_option("--jobs", compare_opts.jobs, "Worker threads (0 = auto)");

    GtOptions validate_opts;
    auto* validate_cmd = app.add_subcommand(
        "validate", "Check ground-truth files for integrity violations");
    add_gt_options(validate_cmd, validate_opts);

    GenOptions gen_opts;
    auto* gen_cmd = app.add_subcommand(
        "gen-synth", "Generate a seeded synthetic corpus plus manifest");
    gen_cmd->add_option("--seed", gen_opts.seed, "Master seed");
    gen_cmd->add_option("--out-dir", gen_opts.out_dir, "Output directory")->required();
    gen_cmd->add_option("--profiles", gen_opts.profiles, "Profile count");
    gen_cmd->add_option("--windows", gen_opts.windows, "Window count");
    gen_cmd->add_option("--start-epoch", gen_opts.start_epoch, "Period start");
    gen_cmd->add_option("--window-seconds", gen_opts.window_seconds, "Window length");
    gen_cmd->add_option("--systems", gen_opts.systems, "Number of simulated systems");
    gen_cmd->add_option("--cap", gen_opts.cap, "Daily push limit");
    gen_cmd->add_option("--silent-rate", gen_opts.silent_rate,
                        "Probability a (profile, window) has no relevant tweets");
    gen_cmd->add_option("--background-rate", gen_opts.background_rate,
                        "Probability of a non-relevant tweet per (profile, window)");
    gen_cmd->add_option("--min-clusters", gen_opts.min_clusters, "Clusters per profile, low");
    gen_cmd->add_option("--max-clusters", gen_opts.max_clusters, "Clusters per profile, high");
    gen_cmd->add_option("--min-tweets", gen_opts.min_tweets, "Tweets per cluster, low");
    gen_cmd->add_option("--max-tweets", gen_opts.max_tweets, "Tweets per cluster, high");

    int rc = 0;
    eval_cmd->callback([&] { rc = do_evaluate(eval_opts); });
    sweep_cmd->callback([&] { rc = do_sweep(sweep_opts); });
    loo_cmd->callback([&] { rc = do_loo(loo_opts); });
    audit_cmd->callback([&] { rc = do_audit(audit_opts); });
    compare_cmd->callback([&] { rc = do_compare(compare_opts); });
    validate_cmd->callback([&] { rc = do_validate(validate_opts); });
    gen_cmd->callback([&] { rc = do_gen_synth(gen_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const StrictDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (const auto& d : e.details) std::cerr << "  " << d << '\n';
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
