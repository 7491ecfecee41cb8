#pragma once
// Scoring engine. Pipeline: collapse -> enforce_cap -> assign_windows ->
// classify -> per-cell metrics -> latency -> aggregates.
//
// Key semantics:
//  - Pushes are grouped for the daily cap by PUSH epoch, but scored in the
//    window of their CREATION epoch, so a tweet pushed late still counts
//    against the day it was written.
//  - First-of-cluster status is decided per profile over all counted pushes
//    in deterministic push order (push_epoch, creation epoch, tweet id).
//  - A window is silent for a run when Z = 0, i.e. no cluster with tweets
//    created there is still unretrieved.

#include <set>
#include <span>
#include <stdexcept>

#include "pusheval/model.hpp"

namespace pusheval {

// Raised in strict mode for pushes with no epoch entry or pushed before
// their creation epoch. Carries one line per offending push.
struct StrictDataError : std::runtime_error {
    explicit StrictDataError(std::vector<std::string> items);
    std::vector<std::string> details;
};

struct CapViolation {
    ProfileId profile;
    std::int64_t day = 0;  // raw push-day index
    int pushed = 0;
    int kept = 0;  // == pushed under official-2016 (nothing removed)
};

struct CapResult {
    Run run;
    std::vector<CapViolation> violations;
};

// Applies the N-per-(profile, push-day) limit. Strict mode keeps the first
// cap pushes of each group in deterministic push order; official-2016 keeps
// everything and only records the violation. Expects a collapsed run.
CapResult enforce_cap(const Run& run, const EvalConfig& cfg);

enum class TweetStatus { RelevantNew, Redundant, JudgedNonRelevant, Unjudged };

struct TweetVerdict {
    TweetId tweet;
    std::int64_t push_epoch = 0;
    std::int64_t creation_epoch = 0;
    int window = 0;  // creation window
    TweetStatus status = TweetStatus::Unjudged;
};

struct Assignment {
    // Per profile: counted pushes in deterministic push order.
    std::map<ProfileId, std::vector<TweetVerdict>> counted;
    std::vector<std::string> warnings;  // dropped pushes, skipped profiles
};

// Places each push in its creation window. Strict mode throws
// StrictDataError on missing epochs / pushes before creation; official-2016
// drops epoch-less pushes. Out-of-range creations are dropped in both modes.
Assignment assign_windows(const Run& capped, const GroundTruth& gt,
                          const EvalConfig& cfg);

// Fills verdict statuses: first counted push of a cluster is RelevantNew,
// later ones Redundant; grade-0 tweets JudgedNonRelevant; rest Unjudged.
void classify(Assignment& asg, const GroundTruth& gt);

// Relevant-new pushes among the first min(cap, size) of a window cell.
int window_gain(std::span<const TweetVerdict> cell, int cap);

// Z = min(cap, clusters of `profile` with at least one ground-truth tweet
// created in `window` and not retrieved by this run in an earlier window).
int max_gain_z(const GroundTruth& gt, const EvalConfig& cfg, const ProfileId& profile,
               int window, const std::map<ClusterToken, int>& retrieved_window);

// Cell-level scores. `pushes` is the full counted size; `gain` is already
// restricted to the first `cap` pushes (the official-2016 mis-normalization
// divides that gain by the full count).
double eg_score(int pushes, int gain, bool silent, Variant v, int cap);
double ncg_score(int pushes, int gain, int z, bool silent, Variant v, int cap);
double gmp_score(int gain, int pain, double alpha);

// Full pipeline for one run. Cells cover every judged profile and every
// window; aggregates are uniform means over those cells, plus latency mean
// and median over profiles.
ScoreReport evaluate_run(const Run& run, const GroundTruth& gt, const EvalConfig& cfg);

struct RankedRun {
    int rank = 0;  // 1-based; ties share the better rank
    std::string tag;
    double score = 0;
};

// Orders reports by the named aggregate, descending (ascending for latency
// metrics); ties are broken lexicographically by tag for presentation but
// share the same rank. Throws std::invalid_argument on an unknown key.
std::vector<RankedRun> rank_runs(const std::vector<ScoreReport>& reports,
                                 std::string_view metric);

}  // namespace pusheval
