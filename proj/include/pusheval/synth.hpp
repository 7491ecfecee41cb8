#pragma once
// Seeded synthetic corpora: ground truth with controllable cluster layout
// and silence, plus simulated systems with tunable precision, verbosity and
// latency. Every draw comes from an explicit per-entity stream, so output
// is byte-identical across platforms and insensitive to entity count.

#include <cstdint>

#include "pusheval/model.hpp"

namespace pusheval {

struct IntRange {
    int lo = 0;
    int hi = 0;  // inclusive
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int profiles = 10;
    int windows = 10;
    std::int64_t start_epoch = 0;
    std::int64_t window_seconds = 86400;
    IntRange clusters_per_profile{2, 6};
    IntRange tweets_per_cluster{1, 4};
    // Probability that a (profile, window) has no relevant tweet creations.
    double silent_rate = 0.2;
    // Probability that a (profile, window) gets one judged-non-relevant
    // background tweet.
    double background_rate = 0.5;
};

// Passes validate_ground_truth by construction. Non-silent windows are
// covered round-robin before extra tweets are placed uniformly, so the
// realized silent fraction tracks silent_rate when enough tweets exist.
GroundTruth gen_ground_truth(const SynthSpec& spec);

struct SystemSpec {
    std::uint64_t seed = 1;
    std::string tag = "sys";
    // Probability that a push targets a relevant tweet (preferring tweets
    // of clusters this run has not pushed yet, then redundant members).
    double precision = 0.8;
    IntRange verbosity{1, 3};  // pushes per (profile, day), capped at cfg.cap
    IntRange latency{0, 600};  // seconds added to the creation epoch
    // Probability of staying quiet on a day with no relevant creations.
    double silence_respect = 1.0;
};

// Simulates one system over the ground truth: each day it pushes tweets
// created that day, relevant with probability `precision`. Never exceeds
// cfg.cap per (profile, push-day); never pushes before creation.
Run gen_run(const GroundTruth& gt, const SystemSpec& sys, const EvalConfig& cfg);

}  // namespace pusheval
