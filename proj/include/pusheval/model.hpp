#pragma once
// Domain model for push-notification stream evaluation: ground truth
// (judgments, clusters, creation epochs), system runs, day windowing,
// evaluation configuration, and the score report produced by the engine.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pusheval {

// Opaque non-empty tokens without whitespace.
using TweetId = std::string;
using ProfileId = std::string;
using ClusterToken = std::string;

// Cluster identity is scoped to a profile: the same token under two
// profiles names two unrelated clusters.
struct ClusterId {
    ProfileId profile;
    ClusterToken token;
    auto operator<=>(const ClusterId&) const = default;
};

// tweet -> creation epoch (integer seconds, UTC). Epochs are >= 0.
using EpochMap = std::map<TweetId, std::int64_t>;

struct GroundTruth {
    // profile -> tweet -> grade (>= 0); relevant means grade >= 1
    std::map<ProfileId, std::map<TweetId, int>> judgments;
    // profile -> tweet -> cluster token
    std::map<ProfileId, std::map<TweetId, ClusterToken>> clusters;
    EpochMap epochs;

    bool is_relevant(const ProfileId& p, const TweetId& t) const;
    std::optional<int> grade(const ProfileId& p, const TweetId& t) const;
    std::optional<ClusterToken> cluster_of(const ProfileId& p, const TweetId& t) const;
    std::optional<std::int64_t> epoch_of(const TweetId& t) const;
    // Judged profiles (union over judgments and clusters), sorted.
    std::vector<ProfileId> profiles() const;

    bool operator==(const GroundTruth&) const = default;
};

struct PushRecord {
    ProfileId profile;
    TweetId tweet;
    std::int64_t push_epoch = 0;

    auto operator<=>(const PushRecord&) const = default;
};

struct Run {
    std::string tag;
    std::vector<PushRecord> pushes;

    bool operator==(const Run&) const = default;
};

// Collapses duplicate (profile, tweet) pushes to the earliest push epoch
// and sorts pushes by (profile, push_epoch, tweet). Idempotent.
// Returns the number of pushes removed.
std::size_t collapse_run(Run& run);

// Half-open evaluation windows [start + j*len, start + (j+1)*len).
struct Windowing {
    std::int64_t start_epoch = 0;
    std::int64_t window_seconds = 86400;
    int window_count = 1;

    // floor((epoch - start) / len): unbounded index, usable as a push-day
    // key even for epochs outside the evaluation period.
    std::int64_t raw_index(std::int64_t epoch) const;
    // Window index in [0, window_count), or nullopt when out of range.
    std::optional<int> window_of(std::int64_t epoch) const;

    bool operator==(const Windowing&) const = default;
};

enum class Mode {
    Strict,        // missing data is an error; daily cap truncates
    Official2016,  // tweets absent from the epoch map are silently ignored;
                   // cap violations mis-normalize (gain over first N,
                   // denominator over all pushes), as the 2016 tooling did
};

// Silent-day handling for EG / nCG.
enum class Variant { Zero, One, Prop };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);
std::string_view variant_suffix(Variant v);  // "0", "1", "p"

struct EvalConfig {
    Windowing windowing;
    int cap = 10;  // max pushes per (profile, day); N in the metric formulas
    std::vector<double> alphas{0.33, 0.50, 0.66};
    Mode mode = Mode::Strict;
    std::vector<Variant> eg_variants{Variant::Zero, Variant::One, Variant::Prop};
    std::vector<Variant> ncg_variants{Variant::Zero, Variant::One, Variant::Prop};
};

// Metric keys as they appear in reports and on the command line.
std::string eg_key(Variant v);           // "EG-0", "EG-1", "EG-p"
std::string ncg_key(Variant v);          // "nCG-0", ...
std::string gmp_key(double alpha);       // "GMP.33", "GMP.50", ...
bool is_latency_metric(std::string_view key);  // ranking sorts these ascending

// One (profile, window) score cell.
struct CellRow {
    ProfileId profile;
    int window = 0;
    int pushes = 0;  // counted pushes attributed to this window, |T_i(w_j)|
    int gain = 0;    // first-of-cluster pushes among the first `cap` counted
    int z = 0;       // min(cap, clusters with tweets here not yet retrieved)
    int pain = 0;    // redundant + judged-non-relevant + unjudged counted
    bool silent = false;  // z == 0
    double eg[3] = {0, 0, 0};    // indexed by Variant
    double ncg[3] = {0, 0, 0};   // indexed by Variant
    std::vector<double> gmp;     // parallel to EvalConfig::alphas
};

struct ProfileLatency {
    ProfileId profile;
    std::int64_t latency_sum = 0;  // sum over retrieved clusters
    int clusters_retrieved = 0;
    bool flagged = false;  // no retrieved clusters: contributes 0, flagged
};

struct ScoreReport {
    std::string run_tag;
    // Echo of the config that produced the report; drives serialization.
    std::vector<Variant> eg_variants;
    std::vector<Variant> ncg_variants;
    std::vector<double> alphas;

    std::vector<CellRow> cells;            // profile-major, window-minor
    std::vector<ProfileLatency> profiles;  // sorted by profile
    // Canonical order: EG-*, nCG-*, GMP.*, Latency-mean, Latency-median.
    std::vector<std::pair<std::string, double>> aggregates;
    std::vector<std::string> warnings;  // drops, skips, cap violations

    const double* aggregate(std::string_view key) const;
};

struct Violation {
    std::string rule;  // "clustered-but-not-relevant", ...
    ProfileId profile;
    TweetId tweet;
    std::string detail;
};

// Checks ground-truth integrity; reports every breach, never throws.
// Rules: clustered tweets must be judged relevant and have an epoch,
// relevant tweets must be clustered, ids non-empty, epochs/grades >= 0.
std::vector<Violation> validate_ground_truth(const GroundTruth& gt);

}  // namespace pusheval
