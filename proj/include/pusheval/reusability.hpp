#pragma once
// Collection reusability analyses: leave-one-out re-ranking against reduced
// ground truth, epoch-coverage audits, and strict vs official-2016 mode
// comparison.

#include <iosfwd>
#include <set>

#include "pusheval/model.hpp"

namespace pusheval {

// (profile, tweet) pairs pushed by `target` and by no other run.
std::set<std::pair<ProfileId, TweetId>> unique_tweets(const Run& target,
                                                      const std::vector<Run>& all_runs);

// Removes the judgments and cluster assignments of the given pairs; empty
// clusters disappear with their members. Epoch entries of removed tweets
// are dropped only under official-2016 (and only when the tweet keeps no
// judgment under any profile); strict keeps every epoch entry so the
// removed tweets still count as unjudged pushes.
GroundTruth reduce_ground_truth(const GroundTruth& gt,
                                const std::set<std::pair<ProfileId, TweetId>>& removed,
                                Mode mode);

struct LooRow {
    std::string tag;
    int orig_rank = 0;
    int loo_rank = 0;
    int delta = 0;  // orig_rank - loo_rank; positive means it moved up
    double orig_score = 0;
    double loo_score = 0;
};

struct LooResult {
    std::vector<LooRow> rows;  // input run order
    double mean_delta = 0;
};

// For each run: rebuild ground truth without that run's unique tweets,
// re-evaluate all runs against it, and compare ranks under `metric`.
// Needs at least two runs.
LooResult leave_one_out(const std::vector<Run>& runs, const GroundTruth& gt,
                        const EvalConfig& cfg, const std::string& metric,
                        int jobs = 1);

// Columns: run orig_rank loo_rank delta orig_score loo_score.
void write_loo_tsv(std::ostream& out, const LooResult& result);

struct EpochAuditRow {
    std::string run;
    TweetId tweet;
    ProfileId profile;
};

struct EpochAudit {
    std::vector<EpochAuditRow> rows;  // run input order, then (profile, tweet)
    struct PerRun {
        std::string run;
        int missing = 0;
        int total = 0;  // collapsed pushes
    };
    std::vector<PerRun> per_run;

    bool clean() const;
    double missing_fraction() const;  // over all pushes of all runs
};

// Lists every pushed (run, profile, tweet) absent from the epoch map.
EpochAudit audit_epoch(const GroundTruth& gt, const std::vector<Run>& runs);

// Columns: run missing_tweet profile; per-run summaries as # comments.
void write_audit_tsv(std::ostream& out, const EpochAudit& audit);

struct ModeComparison {
    std::string tag;
    double strict_score = 0;
    double official_score = 0;
    int strict_rank = 0;
    int official_rank = 0;
};

// Evaluates every run under both modes with identical windowing. Strict
// evaluation errors (missing epochs) propagate.
std::vector<ModeComparison> compare_modes(const std::vector<Run>& runs,
                                          const GroundTruth& gt, const EvalConfig& cfg,
                                          const std::string& metric, int jobs = 1);

// Columns: run strict_score official_score strict_rank official_rank.
void write_modes_tsv(std::ostream& out, const std::vector<ModeComparison>& rows);

}  // namespace pusheval
