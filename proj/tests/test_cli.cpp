#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "pusheval/ingest.hpp"
#include "pusheval/metrics.hpp"
#include "pusheval/reusability.hpp"
#include "pusheval/strategies.hpp"

namespace fs = std::filesystem;
using namespace pusheval;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Env {
    fs::path dir;
    std::string h1;  // ground truth + windowing flags for the H1 fixture
    fs::path s1, s2;
    fixtures::TwoClusterCase fx;
};

const Env& env() {
    static Env e = [] {
        Env e;
        e.dir = fs::temp_directory_path() / "pusheval-cli-tests";
        fs::remove_all(e.dir);
        fs::create_directories(e.dir);

        auto emit = [&](const char* name, auto&& writer) {
            std::ofstream out(e.dir / name, std::ios::binary);
            writer(out);
            return (e.dir / name).string();
        };
        std::string qrels = emit("qrels.txt", [&](std::ostream& o) {
            write_qrels(o, e.fx.gt.judgments);
        });
        std::string clusters = emit("clusters.txt", [&](std::ostream& o) {
            write_clusters(o, e.fx.gt.clusters);
        });
        std::string epochs = emit("epochs.txt", [&](std::ostream& o) {
            write_epochs(o, e.fx.gt.epochs);
        });
        emit("s1.txt", [&](std::ostream& o) { write_run(o, e.fx.s1); });
        emit("s2.txt", [&](std::ostream& o) { write_run(o, e.fx.s2); });
        e.s1 = e.dir / "s1.txt";
        e.s2 = e.dir / "s2.txt";
        e.h1 = "--qrels " + qrels + " --clusters " + clusters + " --epoch " + epochs +
               " --start-epoch 0 --window-seconds 50 --windows 2";
        return e;
    }();
    return e;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out = env().dir / ("cap_out_" + std::to_string(counter));
    fs::path err = env().dir / ("cap_err_" + std::to_string(counter));
    ++counter;
    std::string cmd = std::string("\"") + PUSHEVAL_CLI_PATH + "\" " + args + " > " +
                      out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

}  // namespace

TEST_CASE("cli usage basics") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("").code == 1);                      // a subcommand is required
    CHECK(run_cli("evaluate").code == 1);              // missing required options
    CHECK(run_cli("evaluate " + env().h1).code == 1);  // still missing --run
}

TEST_CASE("evaluate prints the same reports the library computes") {
    const Env& e = env();
    CliResult res = run_cli("evaluate " + e.h1 + " --run " + e.s1.string() + " " +
                            e.s2.string());
    CHECK(res.code == 0);
    CHECK(res.err == "");

    std::ostringstream want;
    write_report(want, evaluate_run(e.fx.s1, e.fx.gt, e.fx.cfg), ReportFormat::Tsv);
    write_report(want, evaluate_run(e.fx.s2, e.fx.gt, e.fx.cfg), ReportFormat::Tsv);
    CHECK(res.out == want.str());

    SUBCASE("two invocations are byte-identical") {
        CliResult again = run_cli("evaluate " + e.h1 + " --run " + e.s1.string() +
                                  " " + e.s2.string());
        CHECK(again.out == res.out);
        CHECK(again.code == res.code);
    }
    SUBCASE("json reports land in the output directory") {
        fs::path outdir = e.dir / "reports";
        CliResult r = run_cli("evaluate " + e.h1 + " --run " + e.s1.string() +
                              " --format json --out " + outdir.string());
        CHECK(r.code == 0);
        std::ostringstream mine;
        write_report(mine, evaluate_run(e.fx.s1, e.fx.gt, e.fx.cfg),
                     ReportFormat::Json);
        CHECK(slurp(outdir / "s1.json") == mine.str());

        std::ifstream in(outdir / "s1.json");
        ScoreReport back = read_report_json(in);
        CHECK(back.run_tag == "s1");
        const double* eg = back.aggregate("EG-0");
        REQUIRE(eg != nullptr);
        CHECK(*eg == 0.25);
    }
    SUBCASE("year presets trim the variant columns") {
        CliResult y16 = run_cli("evaluate " + e.h1 + " --year 2016 --run " +
                                e.s1.string());
        CHECK(y16.code == 0);
        CHECK(y16.out.find("EG-p") == std::string::npos);
        CHECK(y16.out.find("EG-0") != std::string::npos);
        CliResult y17 = run_cli("evaluate " + e.h1 + " --year 2017 --run " +
                                e.s1.string());
        CHECK(y17.out.find("EG-0") == std::string::npos);
        CHECK(y17.out.find("EG-p") != std::string::npos);
        CHECK(run_cli("evaluate " + e.h1 + " --year 2015 --run " + e.s1.string())
                  .code == 1);
    }
    SUBCASE("unreadable input is a usage error") {
        CliResult r = run_cli("evaluate " + e.h1 + " --run /nonexistent/run.txt");
        CHECK(r.code == 1);
        CHECK(r.err.find("cannot read file") != std::string::npos);
    }
}

TEST_CASE("strict data errors exit with code 3") {
    const Env& e = env();
    // Rewrite the epoch file without tX, which run s2 pushes.
    EpochMap gapped = e.fx.gt.epochs;
    gapped.erase("tX");
    fs::path path = e.dir / "epochs_gapped.txt";
    {
        std::ofstream out(path, std::ios::binary);
        write_epochs(out, gapped);
    }
    std::string args = "--qrels " + (e.dir / "qrels.txt").string() + " --clusters " +
                       (e.dir / "clusters.txt").string() + " --epoch " + path.string() +
                       " --start-epoch 0 --window-seconds 50 --windows 2 --run " +
                       e.s2.string();
    CliResult strict = run_cli("evaluate " + args);
    CHECK(strict.code == 3);
    CHECK(strict.err.find("missing-epoch profile=p1 tweet=tX") != std::string::npos);

    CliResult official = run_cli("evaluate " + args + " --mode official-2016");
    CHECK(official.code == 0);
    CHECK(official.err.find("no epoch entry") != std::string::npos);
}

TEST_CASE("validate reports violations and diagnostics") {
    const Env& e = env();
    CliResult clean = run_cli("validate --qrels " + (e.dir / "qrels.txt").string() +
                              " --clusters " + (e.dir / "clusters.txt").string() +
                              " --epoch " + (e.dir / "epochs.txt").string());
    CHECK(clean.code == 0);
    CHECK(clean.out == "clean\n");

    // A relevant tweet with no cluster assignment breaks integrity.
    fs::path bad_qrels = e.dir / "bad_qrels.txt";
    {
        std::ofstream out(bad_qrels, std::ios::binary);
        write_qrels(out, {{"p9", {{"lonely", 1}}}});
    }
    fs::path empty = e.dir / "empty.txt";
    { std::ofstream out(empty, std::ios::binary); }
    fs::path lonely_epochs = e.dir / "lonely_epochs.txt";
    {
        std::ofstream out(lonely_epochs, std::ios::binary);
        write_epochs(out, {{"lonely", 5}});
    }
    CliResult dirty = run_cli("validate --qrels " + bad_qrels.string() +
                              " --clusters " + empty.string() + " --epoch " +
                              lonely_epochs.string());
    CHECK(dirty.code == 2);
    CHECK(dirty.out.find("violation\trelevant-but-unclustered\tp9\tlonely") !=
          std::string::npos);
    CHECK(dirty.out.find("#violations\t1\t#diagnostics\t0") != std::string::npos);

    // Parse diagnostics alone also fail validation.
    fs::path mangled = e.dir / "mangled_qrels.txt";
    {
        std::ofstream out(mangled, std::ios::binary);
        out << "p1 Q0 tA 1\nnot-enough-fields\n";
    }
    fs::path ta_clusters = e.dir / "ta_clusters.txt";
    {
        std::ofstream out(ta_clusters, std::ios::binary);
        write_clusters(out, {{"p1", {{"tA", "c1"}}}});
    }
    fs::path ta_epochs = e.dir / "ta_epochs.txt";
    {
        std::ofstream out(ta_epochs, std::ios::binary);
        write_epochs(out, {{"tA", 10}});
    }
    CliResult diag = run_cli("validate --qrels " + mangled.string() + " --clusters " +
                             ta_clusters.string() + " --epoch " + ta_epochs.string());
    CHECK(diag.code == 2);
    CHECK(diag.out.find("#violations\t0\t#diagnostics\t1") != std::string::npos);
    CHECK(diag.err.find("malformed") != std::string::npos);
}

TEST_CASE("audit-epoch exit code tracks coverage") {
    const Env& e = env();
    std::string gt_args = "--qrels " + (e.dir / "qrels.txt").string() + " --clusters " +
                          (e.dir / "clusters.txt").string();
    CliResult complete = run_cli("audit-epoch " + gt_args + " --epoch " +
                                 (e.dir / "epochs.txt").string() + " --run " +
                                 e.s2.string());
    CHECK(complete.code == 0);
    CHECK(complete.out.find("#total_missing_fraction\t0.000000") != std::string::npos);

    CliResult gapped = run_cli("audit-epoch " + gt_args + " --epoch " +
                               (e.dir / "epochs_gapped.txt").string() + " --run " +
                               e.s2.string());
    CHECK(gapped.code == 3);
    CHECK(gapped.out.find("s2\ttX\tp1") != std::string::npos);
}

TEST_CASE("sweep-n matches the library and rejects bad arguments") {
    const Env& e = env();
    std::string base = "sweep-n " + e.h1 + " --run " + e.s1.string() + " " +
                       e.s2.string();
    CliResult res = run_cli(base + " --strategy gold --metric EG-0 --n-min 1 --n-max 2");
    CHECK(res.code == 0);

    std::vector<Run> runs{e.fx.s1, e.fx.s2};
    SweepResult want = sweep(runs, e.fx.gt, e.fx.cfg, Strategy::Gold, "EG-0", 1, 2, 1,
                             100, GoldPadding::Always, 2);
    std::ostringstream text;
    write_sweep_tsv(text, want);
    CHECK(res.out == text.str());

    CHECK(run_cli(base + " --strategy best").code == 1);
    CHECK(run_cli(base + " --strategy first --n-max 11").code == 1);
    CHECK(run_cli(base + " --strategy first --metric EG-9").code == 1);
    CHECK(run_cli(base + " --strategy first --year 2017 --metric EG-0").code == 1);
    CHECK(run_cli(base + " --strategy random --draws 0").code == 1);
    CHECK(run_cli(base + " --strategy gold --gold-padding sometimes").code == 1);
}

TEST_CASE("leave-one-out needs two distinct runs") {
    const Env& e = env();
    std::string base = "leave-one-out " + e.h1;
    CHECK(run_cli(base + " --run " + e.s1.string()).code == 1);
    CHECK(run_cli(base + " --run " + e.s1.string() + " " + e.s1.string()).code == 1);

    CliResult res =
        run_cli(base + " --run " + e.s1.string() + " " + e.s2.string());
    CHECK(res.code == 0);
    std::vector<Run> runs{e.fx.s1, e.fx.s2};
    std::ostringstream text;
    write_loo_tsv(text, leave_one_out(runs, e.fx.gt, e.fx.cfg, "EG-1", 2));
    CHECK(res.out == text.str());
}

TEST_CASE("compare-modes matches the library") {
    const Env& e = env();
    CliResult res = run_cli("compare-modes " + e.h1 + " --run " + e.s1.string() +
                            " " + e.s2.string() + " --metric nCG-0");
    CHECK(res.code == 0);
    std::vector<Run> runs{e.fx.s1, e.fx.s2};
    std::ostringstream text;
    write_modes_tsv(text, compare_modes(runs, e.fx.gt, e.fx.cfg, "nCG-0", 2));
    CHECK(res.out == text.str());
}

TEST_CASE("gen-synth produces a self-consistent corpus") {
    const Env& e = env();
    fs::path corpus = e.dir / "corpus";
    CliResult gen = run_cli("gen-synth --seed 5 --out-dir " + corpus.string() +
                            " --profiles 3 --windows 4 --window-seconds 1000"
                            " --systems 2");
    CHECK(gen.code == 0);
    for (const char* name : {"qrels.txt", "clusters.txt", "epochs.txt",
                             "run_sys01.txt", "run_sys02.txt", "manifest.json"})
        CHECK(fs::exists(corpus / name));

    std::string gt_args = "--qrels " + (corpus / "qrels.txt").string() +
                          " --clusters " + (corpus / "clusters.txt").string() +
                          " --epoch " + (corpus / "epochs.txt").string();
    CliResult valid = run_cli("validate " + gt_args);
    CHECK(valid.code == 0);
    CHECK(valid.out == "clean\n");

    CliResult eval = run_cli("evaluate " + gt_args +
                             " --start-epoch 0 --window-seconds 1000 --windows 4"
                             " --run " + (corpus / "run_sys01.txt").string() + " " +
                             (corpus / "run_sys02.txt").string());
    CHECK(eval.code == 0);  // generated runs are strict-safe

    CHECK(run_cli("gen-synth --seed 5 --out-dir " + (e.dir / "x").string() +
                  " --min-clusters 4 --max-clusters 2")
              .code == 1);
    CHECK(run_cli("gen-synth --seed 5 --out-dir " + (e.dir / "x").string() +
                  " --silent-rate 1.5")
              .code == 1);
}
