#include "pusheval/strategies.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "pusheval/ingest.hpp"
#include "pusheval/metrics.hpp"
#include "pusheval/parallel.hpp"
#include "pusheval/rng.hpp"

namespace pusheval {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::First: return "first";
        case Strategy::Gold: return "gold";
        default: return "random";
    }
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    if (s == "first") return Strategy::First;
    if (s == "gold") return Strategy::Gold;
    if (s == "random") return Strategy::Random;
    return std::nullopt;
}

namespace {

struct OrderedPush {
    PushRecord rec;
    std::int64_t creation = 0;
    bool creation_known = false;
};

// Deterministic push order; unknown creation epochs sort last in their tie.
bool det_less(const OrderedPush& a, const OrderedPush& b) {
    std::int64_t ca = a.creation_known ? a.creation : std::numeric_limits<std::int64_t>::max();
    std::int64_t cb = b.creation_known ? b.creation : std::numeric_limits<std::int64_t>::max();
    return std::tie(a.rec.push_epoch, ca, a.rec.tweet) <
           std::tie(b.rec.push_epoch, cb, b.rec.tweet);
}

using DayGroups = std::map<std::pair<ProfileId, std::int64_t>, std::vector<OrderedPush>>;

DayGroups group_by_push_day(const Run& run, const GroundTruth& gt,
                            const EvalConfig& cfg) {
    Run collapsed = run;
    collapse_run(collapsed);
    DayGroups groups;
    for (const auto& pr : collapsed.pushes) {
        OrderedPush op{pr, 0, false};
        if (auto ep = gt.epoch_of(pr.tweet)) {
            op.creation = *ep;
            op.creation_known = true;
        }
        groups[{pr.profile, cfg.windowing.raw_index(pr.push_epoch)}].push_back(op);
    }
    for (auto& [key, vec] : groups) std::sort(vec.begin(), vec.end(), det_less);
    return groups;
}

Run rebuild(const std::string& tag, const std::vector<PushRecord>& pushes) {
    Run out{tag, pushes};
    collapse_run(out);
    return out;
}

}  // namespace

Run restrict_first(const Run& run, const GroundTruth& gt, const EvalConfig& cfg, int n) {
    std::vector<PushRecord> kept;
    for (auto& [key, vec] : group_by_push_day(run, gt, cfg)) {
        std::size_t take = std::min(vec.size(), static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < take; ++i) kept.push_back(vec[i].rec);
    }
    return rebuild(run.tag, kept);
}

Run restrict_gold(const Run& run, const GroundTruth& gt, const EvalConfig& cfg, int n,
                  GoldPadding padding) {
    std::vector<PushRecord> kept;
    DayGroups groups = group_by_push_day(run, gt, cfg);
    // Map iteration is profile-major with days ascending, which is exactly
    // the chronological sweep the retrieved set must follow.
    ProfileId current;
    std::set<ClusterToken> retrieved;
    for (auto& [key, vec] : groups) {
        if (key.first != current) {
            current = key.first;
            retrieved.clear();
        }
        std::vector<std::size_t> selected;
        std::set<ClusterToken> selected_clusters;
        for (std::size_t i = 0; i < vec.size() && selected.size() < static_cast<std::size_t>(n); ++i) {
            auto c = gt.cluster_of(key.first, vec[i].rec.tweet);
            if (!c || retrieved.contains(*c) || selected_clusters.contains(*c)) continue;
            selected.push_back(i);
            selected_clusters.insert(*c);
        }
        if (padding == GoldPadding::Always) {
            std::set<std::size_t> chosen(selected.begin(), selected.end());
            for (std::size_t i = 0; i < vec.size() && selected.size() < static_cast<std::size_t>(n); ++i) {
                if (chosen.contains(i)) continue;
                selected.push_back(i);
                chosen.insert(i);
            }
        }
        for (std::size_t i : selected) kept.push_back(vec[i].rec);
        retrieved.insert(selected_clusters.begin(), selected_clusters.end());
    }
    return rebuild(run.tag, kept);
}

std::vector<Run> restrict_random(const Run& run, const EvalConfig& cfg, int n,
                                 std::uint64_t seed, int draws) {
    // Creation epochs are irrelevant to a uniform subset; group with an
    // empty ground truth so ordering falls back to (push_epoch, tweet).
    GroundTruth empty;
    DayGroups groups = group_by_push_day(run, empty, cfg);
    std::vector<Run> out;
    for (int d = 0; d < draws; ++d) {
        std::vector<PushRecord> kept;
        for (auto& [key, vec] : groups) {
            if (vec.size() <= static_cast<std::size_t>(n)) {
                for (const auto& op : vec) kept.push_back(op.rec);
                continue;
            }
            Rng rng(mix_seed({seed, static_cast<std::uint64_t>(d),
                              fnv1a64(key.first),
                              static_cast<std::uint64_t>(key.second)}));
            for (int i : rng.sample_indices(static_cast<int>(vec.size()), n))
                kept.push_back(vec[static_cast<std::size_t>(i)].rec);
        }
        out.push_back(rebuild(run.tag, kept));
    }
    return out;
}

SweepResult sweep(const std::vector<Run>& runs, const GroundTruth& gt,
                  const EvalConfig& cfg, Strategy strategy, const std::string& metric,
                  int n_min, int n_max, std::uint64_t seed, int draws,
                  GoldPadding padding, int jobs) {
    if (n_min < 1 || n_min > n_max || n_max > cfg.cap)
        throw std::invalid_argument("sweep range must satisfy 1 <= n_min <= n_max <= cap");
    if (strategy == Strategy::Random && draws < 1)
        throw std::invalid_argument("random sweep needs at least one draw");

    SweepResult result;
    result.strategy = strategy;
    result.metric = metric;
    result.runs = static_cast<int>(runs.size());
    result.draws = strategy == Strategy::Random ? draws : 1;
    result.seed = seed;

    for (int n = n_min; n <= n_max; ++n) {
        std::vector<double> per_run(runs.size(), 0.0);
        parallel_for(runs.size(), jobs, [&](std::size_t i) {
            auto score = [&](const Run& restricted) {
                ScoreReport rep = evaluate_run(restricted, gt, cfg);
                const double* v = rep.aggregate(metric);
                if (!v) throw std::invalid_argument("unknown metric key: " + metric);
                return *v;
            };
            switch (strategy) {
                case Strategy::First:
                    per_run[i] = score(restrict_first(runs[i], gt, cfg, n));
                    break;
                case Strategy::Gold:
                    per_run[i] = score(restrict_gold(runs[i], gt, cfg, n, padding));
                    break;
                case Strategy::Random: {
                    double s = 0;
                    for (const Run& r : restrict_random(runs[i], cfg, n, seed, draws))
                        s += score(r);
                    per_run[i] = s / draws;
                    break;
                }
            }
        });
        double mean = 0;
        for (double v : per_run) mean += v;
        if (!per_run.empty()) mean /= static_cast<double>(per_run.size());
        result.rows.push_back({n, mean});
    }
    return result;
}

void write_sweep_tsv(std::ostream& out, const SweepResult& result) {
    out << "strategy\tN\tmetric\tmean\truns\tdraws\tseed\n";
    for (const auto& row : result.rows)
        out << to_string(result.strategy) << '\t' << row.n << '\t' << result.metric
            << '\t' << format_fixed(row.mean) << '\t' << result.runs << '\t'
            << result.draws << '\t' << result.seed << '\n';
}

}  // namespace pusheval
