#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "gen.hpp"
#include "pusheval/metrics.hpp"
#include "pusheval/strategies.hpp"

using namespace pusheval;

namespace {

// Mirrors the strategies' day grouping: collapsed pushes keyed by
// (profile, raw push-day index).
std::map<std::pair<ProfileId, std::int64_t>, std::vector<PushRecord>> day_groups(
    const Run& run, const EvalConfig& cfg) {
    Run collapsed = run;
    collapse_run(collapsed);
    std::map<std::pair<ProfileId, std::int64_t>, std::vector<PushRecord>> groups;
    for (const auto& pr : collapsed.pushes)
        groups[{pr.profile, cfg.windowing.raw_index(pr.push_epoch)}].push_back(pr);
    return groups;
}

std::set<ClusterToken> clusters_of(const std::vector<PushRecord>& pushes,
                                   const GroundTruth& gt) {
    std::set<ClusterToken> out;
    for (const auto& pr : pushes)
        if (auto c = gt.cluster_of(pr.profile, pr.tweet)) out.insert(*c);
    return out;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
    for (Strategy s : {Strategy::First, Strategy::Gold, Strategy::Random})
        CHECK(strategy_from_string(to_string(s)) == s);
    CHECK_FALSE(strategy_from_string("best").has_value());
}

TEST_CASE("restrict_first keeps the first n per day in deterministic order") {
    GroundTruth gt;
    gt.judgments["p1"] = {{"tA", 1}, {"tB", 1}};
    gt.epochs = {{"tA", 20}, {"tB", 10}};
    EvalConfig cfg;
    cfg.windowing = {0, 50, 2};

    SUBCASE("push-epoch ties break by creation epoch") {
        Run run{"r", {{"p1", "tA", 30}, {"p1", "tB", 30}}};
        Run kept = restrict_first(run, gt, cfg, 1);
        REQUIRE(kept.pushes.size() == 1);
        CHECK(kept.pushes[0].tweet == "tB");
    }
    SUBCASE("unknown creation epochs sort last within a tie") {
        Run run{"r", {{"p1", "tU", 30}, {"p1", "tA", 30}}};
        Run kept = restrict_first(run, gt, cfg, 1);
        REQUIRE(kept.pushes.size() == 1);
        CHECK(kept.pushes[0].tweet == "tA");
    }
    SUBCASE("each push-day gets its own budget") {
        Run same_day{"r", {{"p1", "tA", 30}, {"p1", "tB", 40}}};
        CHECK(restrict_first(same_day, gt, cfg, 1).pushes.size() == 1);
        Run split{"r", {{"p1", "tA", 30}, {"p1", "tB", 70}}};
        CHECK(restrict_first(split, gt, cfg, 1).pushes.size() == 2);
    }
    SUBCASE("n at least the group size keeps everything") {
        Run run{"r", {{"p1", "tA", 30}, {"p1", "tB", 40}}};
        Run kept = restrict_first(run, gt, cfg, 5);
        Run collapsed = run;
        collapse_run(collapsed);
        CHECK(kept == collapsed);
    }
}

TEST_CASE("restrict_gold covers new clusters and carries state across days") {
    fixtures::TwoClusterCase fx;

    Run padded = restrict_gold(fx.s1, fx.gt, fx.cfg, 1, GoldPadding::Always);
    CHECK(padded == fx.s1);  // day 1 slot is refilled with the redundant tB

    Run lean = restrict_gold(fx.s1, fx.gt, fx.cfg, 1, GoldPadding::Never);
    CHECK(lean == Run{"s1", {{"p1", "tA", 12}}});

    // Dropping the redundant push is what lifts EG from 0.25 to 0.5.
    CHECK(*evaluate_run(lean, fx.gt, fx.cfg).aggregate("EG-0") == 0.5);
}

TEST_CASE("restrict_gold prefers one push per cluster before padding") {
    GroundTruth gt;
    gt.judgments["p1"] = {{"tA", 1}, {"tB", 1}, {"tC", 1}, {"tX", 0}};
    gt.clusters["p1"] = {{"tA", "c1"}, {"tB", "c1"}, {"tC", "c2"}};
    gt.epochs = {{"tA", 1}, {"tB", 2}, {"tC", 3}, {"tX", 4}};
    EvalConfig cfg;
    cfg.windowing = {0, 100, 1};
    Run run{"r", {{"p1", "tA", 10}, {"p1", "tB", 11}, {"p1", "tC", 12}}};

    Run two = restrict_gold(run, gt, cfg, 2);
    CHECK(two == Run{"r", {{"p1", "tA", 10}, {"p1", "tC", 12}}});

    Run three = restrict_gold(run, gt, cfg, 3);
    Run collapsed = run;
    collapse_run(collapsed);
    CHECK(three == collapsed);  // padding restores the redundant tB

    SUBCASE("unclustered pushes are padding, never greedy picks") {
        Run mixed{"r", {{"p1", "tX", 10}, {"p1", "tA", 11}}};
        CHECK(restrict_gold(mixed, gt, cfg, 1) == Run{"r", {{"p1", "tA", 11}}});
        Run both = mixed;
        collapse_run(both);
        CHECK(restrict_gold(mixed, gt, cfg, 2) == both);
    }
}

TEST_CASE("restrict_gold retrieved state resets per profile") {
    GroundTruth gt;
    gt.judgments["p1"] = {{"u1", 1}};
    gt.judgments["p2"] = {{"u2", 1}};
    gt.clusters["p1"] = {{"u1", "c1"}};
    gt.clusters["p2"] = {{"u2", "c1"}};  // same token, different cluster
    gt.epochs = {{"u1", 5}, {"u2", 5}};
    EvalConfig cfg;
    cfg.windowing = {0, 100, 1};
    Run run{"r", {{"p1", "u1", 10}, {"p2", "u2", 10}}};
    CHECK(restrict_gold(run, gt, cfg, 1, GoldPadding::Never).pushes.size() == 2);
}

TEST_CASE("restrict_gold is group-wise optimal on generated instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        testgen::Instance ins = testgen::make_instance(seed, false);
        for (int n : {1, 2, 3}) {
            for (GoldPadding padding : {GoldPadding::Always, GoldPadding::Never}) {
                Run gold = restrict_gold(ins.run, ins.gt, ins.cfg, n, padding);
                auto gold_groups = day_groups(gold, ins.cfg);

                std::set<ClusterToken> retrieved;
                ProfileId current;
                for (const auto& [key, group] : day_groups(ins.run, ins.cfg)) {
                    if (key.first != current) {
                        current = key.first;
                        retrieved.clear();
                    }
                    std::vector<PushRecord> kept;
                    if (auto it = gold_groups.find(key); it != gold_groups.end())
                        kept = it->second;

                    // Every kept push must come from this group.
                    for (const auto& pr : kept)
                        CHECK(std::count(group.begin(), group.end(), pr) == 1);
                    CHECK(kept.size() <= static_cast<std::size_t>(n));
                    if (padding == GoldPadding::Always)
                        CHECK(kept.size() ==
                              std::min(group.size(), static_cast<std::size_t>(n)));

                    // The greedy pick must retrieve as many new clusters as
                    // any size-n subset of the group possibly could.
                    int new_gold = 0;
                    for (const ClusterToken& c : clusters_of(kept, ins.gt))
                        if (!retrieved.contains(c)) ++new_gold;
                    int reachable = 0;
                    for (const ClusterToken& c : clusters_of(group, ins.gt))
                        if (!retrieved.contains(c)) ++reachable;
                    CHECK(new_gold == std::min(n, reachable));
                    if (padding == GoldPadding::Never)
                        CHECK(kept.size() == static_cast<std::size_t>(new_gold));

                    for (const ClusterToken& c : clusters_of(kept, ins.gt))
                        retrieved.insert(c);
                }
            }
        }
    }
}

TEST_CASE("restrict_random draws uniform subsets deterministically") {
    Run run{"r", {}};
    for (int i = 0; i < 10; ++i)
        run.pushes.push_back({"p1", "t" + std::to_string(i), 100 + i});
    run.pushes.push_back({"p2", "solo", 105});
    EvalConfig cfg;
    cfg.windowing = {0, 86400, 1};

    std::vector<Run> draws = restrict_random(run, cfg, 3, 42, 20);
    REQUIRE(draws.size() == 20);
    CHECK(draws == restrict_random(run, cfg, 3, 42, 20));  // reproducible

    Run collapsed = run;
    collapse_run(collapsed);
    std::set<PushRecord> pool(collapsed.pushes.begin(), collapsed.pushes.end());
    for (const Run& d : draws) {
        CHECK(d.tag == "r");
        std::map<std::pair<ProfileId, std::int64_t>, int> sizes;
        for (const auto& pr : d.pushes) {
            CHECK(pool.contains(pr));
            sizes[{pr.profile, cfg.windowing.raw_index(pr.push_epoch)}] += 1;
        }
        CHECK(sizes[{"p1", 0}] == 3);   // oversized group: exactly n survive
        CHECK(sizes[{"p2", 0}] == 1);   // group within budget kept whole
    }
    CHECK(draws[0] != draws[1]);  // distinct draw indices give distinct picks

    SUBCASE("input order does not matter") {
        Run reversed = run;
        std::reverse(reversed.pushes.begin(), reversed.pushes.end());
        CHECK(restrict_random(reversed, cfg, 3, 42, 20) == draws);
    }
    SUBCASE("every group member is reachable") {
        std::set<TweetId> seen;
        for (const Run& d : restrict_random(run, cfg, 1, 7, 200))
            for (const auto& pr : d.pushes) seen.insert(pr.tweet);
        CHECK(seen.size() == 11);  // all ten p1 tweets plus p2's solo
    }
}

TEST_CASE("sweep validates its range and metric") {
    fixtures::TwoClusterCase fx;
    std::vector<Run> runs{fx.s1};
    CHECK_THROWS_AS(sweep(runs, fx.gt, fx.cfg, Strategy::First, "EG-1", 0, 2, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep(runs, fx.gt, fx.cfg, Strategy::First, "EG-1", 3, 2, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        sweep(runs, fx.gt, fx.cfg, Strategy::First, "EG-1", 1, fx.cfg.cap + 1, 1, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(sweep(runs, fx.gt, fx.cfg, Strategy::Random, "EG-1", 1, 2, 1, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep(runs, fx.gt, fx.cfg, Strategy::First, "EG-9", 1, 2, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("sweep composes restrict + evaluate exactly") {
    fixtures::TwoClusterCase fx;
    std::vector<Run> runs{fx.s1, fx.s2};

    SUBCASE("deterministic strategy") {
        SweepResult res =
            sweep(runs, fx.gt, fx.cfg, Strategy::Gold, "EG-0", 1, 3, 9, 5,
                  GoldPadding::Never);
        CHECK(res.draws == 1);  // draws only apply to the random strategy
        CHECK(res.runs == 2);
        REQUIRE(res.rows.size() == 3);
        for (int n = 1; n <= 3; ++n) {
            double mean = 0;
            for (const Run& r : runs) {
                Run g = restrict_gold(r, fx.gt, fx.cfg, n, GoldPadding::Never);
                mean += *evaluate_run(g, fx.gt, fx.cfg).aggregate("EG-0");
            }
            mean /= 2.0;
            CHECK(res.rows[n - 1].n == n);
            CHECK(res.rows[n - 1].mean == mean);
        }
    }
    SUBCASE("random strategy averages over draws first") {
        SweepResult res =
            sweep(runs, fx.gt, fx.cfg, Strategy::Random, "EG-1", 1, 2, 7, 3);
        CHECK(res.draws == 3);
        REQUIRE(res.rows.size() == 2);
        for (int n = 1; n <= 2; ++n) {
            double mean = 0;
            for (const Run& r : runs) {
                double s = 0;
                for (const Run& d : restrict_random(r, fx.cfg, n, 7, 3))
                    s += *evaluate_run(d, fx.gt, fx.cfg).aggregate("EG-1");
                mean += s / 3;
            }
            mean /= 2.0;
            CHECK(res.rows[n - 1].mean == mean);
        }
    }
    SUBCASE("worker count cannot change the result") {
        SweepResult serial =
            sweep(runs, fx.gt, fx.cfg, Strategy::Random, "nCG-p", 1, 4, 3, 8,
                  GoldPadding::Always, 1);
        SweepResult parallel =
            sweep(runs, fx.gt, fx.cfg, Strategy::Random, "nCG-p", 1, 4, 3, 8,
                  GoldPadding::Always, 4);
        REQUIRE(serial.rows.size() == parallel.rows.size());
        for (std::size_t i = 0; i < serial.rows.size(); ++i) {
            CHECK(serial.rows[i].n == parallel.rows[i].n);
            CHECK(serial.rows[i].mean == parallel.rows[i].mean);
        }
    }
}

TEST_CASE("sweep table format") {
    SweepResult res;
    res.strategy = Strategy::Gold;
    res.metric = "EG-1";
    res.rows = {{1, 0.375}, {2, 0.5}};
    res.runs = 2;
    res.draws = 1;
    res.seed = 9;
    std::ostringstream out;
    write_sweep_tsv(out, res);
    CHECK(out.str() ==
          "strategy\tN\tmetric\tmean\truns\tdraws\tseed\n"
          "gold\t1\tEG-1\t0.375000\t2\t1\t9\n"
          "gold\t2\tEG-1\t0.500000\t2\t1\t9\n");
}
