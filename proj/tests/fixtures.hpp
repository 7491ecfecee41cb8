#pragma once
// Hand-built golden fixtures with frozen expected values. Each builder
// returns fresh copies so tests may mutate them freely.

#include "pusheval/model.hpp"

namespace fixtures {

using pusheval::EvalConfig;
using pusheval::GroundTruth;
using pusheval::Run;

// Two 50-second windows starting at 0; one profile with two clusters.
//   c1 = {tA (epoch 10), tB (epoch 20)}, c2 = {tC (epoch 60)}; tX judged 0.
// s1 pushes tA@12 and tB@55 (redundant); s2 pushes tA@12 and tX@75.
// Frozen aggregates: EG-* s1 0.25 / s2 0.5; nCG-* both 0.5;
// GMP.50 both 0; latency both 2.
struct TwoClusterCase {
    GroundTruth gt;
    Run s1{"s1", {{"p1", "tA", 12}, {"p1", "tB", 55}}};
    Run s2{"s2", {{"p1", "tA", 12}, {"p1", "tX", 75}}};
    EvalConfig cfg;

    TwoClusterCase() {
        gt.judgments["p1"] = {{"tA", 1}, {"tB", 1}, {"tC", 1}, {"tX", 0}};
        gt.clusters["p1"] = {{"tA", "c1"}, {"tB", "c1"}, {"tC", "c2"}};
        gt.epochs = {{"tA", 10}, {"tB", 20}, {"tC", 60}, {"tX", 70}};
        cfg.windowing = {0, 50, 2};
    }
};

// Same windowing; one cluster c1 = {tA (10), tB (20)}, so window 1 is
// silent for every run. s1 pushes tA@12; s2 adds the redundant tB@55.
// Frozen aggregates: EG-0 0.5 / 0.25; EG-1 = EG-p 1 / 0.75;
// nCG-0 0.5 / 0.5; nCG-1 = nCG-p 1 / 1; GMP.50 0.25 / 0; latency 2 / 2.
struct SilentWindowCase {
    GroundTruth gt;
    Run s1{"s1", {{"p1", "tA", 12}}};
    Run s2{"s2", {{"p1", "tA", 12}, {"p1", "tB", 55}}};
    EvalConfig cfg;

    SilentWindowCase() {
        gt.judgments["p1"] = {{"tA", 1}, {"tB", 2}};
        gt.clusters["p1"] = {{"tA", "c1"}, {"tB", "c1"}};
        gt.epochs = {{"tA", 10}, {"tB", 20}};
        cfg.windowing = {0, 50, 2};
    }
};

// Five 50-second windows; three singleton clusters created at 0, 100, 200.
// sl1 pushes each tweet 2, 10, 20 seconds after creation: latency sum 32.
// sl2 pushes at 65, 140, 210: latency sum 115.
struct LatencyCase {
    GroundTruth gt;
    Run sl1{"sl1", {{"p1", "t1", 2}, {"p1", "t2", 110}, {"p1", "t3", 220}}};
    Run sl2{"sl2", {{"p1", "t1", 65}, {"p1", "t2", 140}, {"p1", "t3", 210}}};
    EvalConfig cfg;

    LatencyCase() {
        gt.judgments["p1"] = {{"t1", 1}, {"t2", 1}, {"t3", 1}};
        gt.clusters["p1"] = {{"t1", "ca"}, {"t2", "cb"}, {"t3", "cc"}};
        gt.epochs = {{"t1", 0}, {"t2", 100}, {"t3", 200}};
        cfg.windowing = {0, 50, 5};
    }
};

// One window, no clusters at all, so the single cell is silent for any run.
// Pushing k judged-non-relevant tweets yields EG-p = (10 - k) / 10.
struct SilentPushCase {
    GroundTruth gt;
    Run one{"one", {{"p1", "tN", 15}}};
    Run two{"two", {{"p1", "tN", 15}, {"p1", "tM", 25}}};
    EvalConfig cfg;

    SilentPushCase() {
        gt.judgments["p1"] = {{"tN", 0}, {"tM", 0}};
        gt.epochs = {{"tN", 10}, {"tM", 20}};
        cfg.windowing = {0, 100, 1};
    }
};

// One window; 12 relevant tweets in 12 distinct clusters, all created and
// pushed on the same day (creation i*100, push i*100+10). With cap 10 the
// run exceeds the daily limit: official-2016 keeps all 12 and scores
// EG = 10/12; strict truncates to the first 10 and scores 10/10.
struct OverCapCase {
    GroundTruth gt;
    Run burst{"burst", {}};
    EvalConfig cfg;

    OverCapCase() {
        for (int i = 1; i <= 12; ++i) {
            std::string t = "t" + std::to_string(i);
            gt.judgments["p1"][t] = 1;
            gt.clusters["p1"][t] = "c" + std::to_string(i);
            gt.epochs[t] = i * 100;
            burst.pushes.push_back({"p1", t, i * 100 + 10});
        }
        cfg.windowing = {0, 86400, 1};
    }
};

// Epoch-coverage gap: the complete record has an epoch for the unjudged
// tweet tU; the gapped record lacks it. The run pushes tA (relevant) and
// tU. Under strict + complete, tU lands in window 1 as pain: EG-1 = 0.5.
// Under official-2016 + gapped, tU silently disappears and window 1 stays
// an empty silent cell: EG-1 = 1.0. Strict + gapped is a data error.
struct EpochGapCase {
    GroundTruth complete;
    GroundTruth gapped;
    Run gap_run{"gap", {{"p1", "tA", 12}, {"p1", "tU", 65}}};
    EvalConfig cfg;

    EpochGapCase() {
        complete.judgments["p1"] = {{"tA", 1}};
        complete.clusters["p1"] = {{"tA", "c1"}};
        complete.epochs = {{"tA", 10}, {"tU", 60}};
        gapped = complete;
        gapped.epochs.erase("tU");
        cfg.windowing = {0, 50, 2};
    }
};

}  // namespace fixtures
