#pragma once
// Push-selection strategies: restrict a run to n pushes per (profile,
// push-day) and sweep the restriction over a range of n to study how the
// daily budget interacts with each metric.

#include <cstdint>
#include <iosfwd>

#include "pusheval/model.hpp"

namespace pusheval {

enum class Strategy { First, Gold, Random };
enum class GoldPadding { Always, Never };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

// Keeps the first n pushes of each (profile, push-day) group in
// deterministic push order.
Run restrict_first(const Run& run, const GroundTruth& gt, const EvalConfig& cfg, int n);

// Greedy cluster cover: one push per distinct not-yet-retrieved cluster
// (earliest push per cluster), processing days chronologically so retrieved
// state carries forward. Groups with spare slots are padded with the
// earliest remaining pushes unless padding is Never.
Run restrict_gold(const Run& run, const GroundTruth& gt, const EvalConfig& cfg, int n,
                  GoldPadding padding = GoldPadding::Always);

// `draws` independent uniform n-subsets per (profile, push-day) group.
// Each group's generator is seeded by (seed, draw, profile, day), so the
// result is reproducible and insensitive to evaluation order.
std::vector<Run> restrict_random(const Run& run, const EvalConfig& cfg, int n,
                                 std::uint64_t seed, int draws);

struct SweepRow {
    int n = 0;
    double mean = 0;  // metric mean over runs (random: over draws first)
};

struct SweepResult {
    Strategy strategy = Strategy::First;
    std::string metric;
    std::vector<SweepRow> rows;
    int runs = 0;
    int draws = 1;  // 1 for deterministic strategies
    std::uint64_t seed = 0;
};

// Restricts every run at each n in [n_min, n_max], evaluates under cfg, and
// averages the named aggregate metric over runs. Requires
// 1 <= n_min <= n_max <= cfg.cap.
SweepResult sweep(const std::vector<Run>& runs, const GroundTruth& gt,
                  const EvalConfig& cfg, Strategy strategy, const std::string& metric,
                  int n_min, int n_max, std::uint64_t seed, int draws,
                  GoldPadding padding = GoldPadding::Always, int jobs = 1);

// Columns: strategy N metric mean runs draws seed.
void write_sweep_tsv(std::ostream& out, const SweepResult& result);

}  // namespace pusheval
