#include "pusheval/metrics.hpp"

#include <algorithm>
#include <tuple>

namespace pusheval {

StrictDataError::StrictDataError(std::vector<std::string> items)
    : std::runtime_error("strict mode data error (" + std::to_string(items.size()) +
                         " offending push" + (items.size() == 1 ? ")" : "es)")),
      details(std::move(items)) {}

CapResult enforce_cap(const Run& run, const EvalConfig& cfg) {
    CapResult out;
    out.run.tag = run.tag;
    // Group by (profile, push-day). The order key here is (push_epoch,
    // tweet): creation epochs are not available to the cap stage.
    std::map<std::pair<ProfileId, std::int64_t>, std::vector<PushRecord>> groups;
    for (const auto& pr : run.pushes)
        groups[{pr.profile, cfg.windowing.raw_index(pr.push_epoch)}].push_back(pr);
    for (auto& [key, vec] : groups) {
        std::sort(vec.begin(), vec.end(),
                  [](const PushRecord& a, const PushRecord& b) {
                      return std::tie(a.push_epoch, a.tweet) <
                             std::tie(b.push_epoch, b.tweet);
                  });
        int pushed = static_cast<int>(vec.size());
        if (pushed > cfg.cap) {
            bool trim = cfg.mode == Mode::Strict;
            out.violations.push_back({key.first, key.second, pushed,
                                      trim ? cfg.cap : pushed});
            if (trim) vec.resize(static_cast<std::size_t>(cfg.cap));
        }
        out.run.pushes.insert(out.run.pushes.end(), vec.begin(), vec.end());
    }
    collapse_run(out.run);  // restores the canonical push order
    return out;
}

Assignment assign_windows(const Run& capped, const GroundTruth& gt,
                          const EvalConfig& cfg) {
    Assignment asg;
    std::vector<std::string> offenders;
    auto judged = gt.profiles();
    std::set<ProfileId> judged_set(judged.begin(), judged.end());
    std::set<ProfileId> skipped;

    for (const auto& pr : capped.pushes) {
        if (!judged_set.contains(pr.profile)) {
            if (skipped.insert(pr.profile).second)
                asg.warnings.push_back("skipping pushes for unjudged profile " +
                                       pr.profile);
            continue;
        }
        auto ep = gt.epoch_of(pr.tweet);
        if (!ep) {
            if (cfg.mode == Mode::Strict)
                offenders.push_back("missing-epoch profile=" + pr.profile +
                                    " tweet=" + pr.tweet);
            else
                asg.warnings.push_back("ignoring push (" + pr.profile + ", " +
                                       pr.tweet + "): no epoch entry");
            continue;
        }
        if (cfg.mode == Mode::Strict && pr.push_epoch < *ep) {
            offenders.push_back("push-before-creation profile=" + pr.profile +
                                " tweet=" + pr.tweet +
                                " push=" + std::to_string(pr.push_epoch) +
                                " creation=" + std::to_string(*ep));
            continue;
        }
        auto w = cfg.windowing.window_of(*ep);
        if (!w) {
            asg.warnings.push_back("dropping push (" + pr.profile + ", " + pr.tweet +
                                   "): creation epoch " + std::to_string(*ep) +
                                   " outside the evaluation period");
            continue;
        }
        asg.counted[pr.profile].push_back(
            {pr.tweet, pr.push_epoch, *ep, *w, TweetStatus::Unjudged});
    }
    if (!offenders.empty()) throw StrictDataError(std::move(offenders));

    for (auto& [p, vec] : asg.counted)
        std::sort(vec.begin(), vec.end(),
                  [](const TweetVerdict& a, const TweetVerdict& b) {
                      return std::tie(a.push_epoch, a.creation_epoch, a.tweet) <
                             std::tie(b.push_epoch, b.creation_epoch, b.tweet);
                  });
    return asg;
}

void classify(Assignment& asg, const GroundTruth& gt) {
    for (auto& [p, vec] : asg.counted) {
        std::set<ClusterToken> retrieved;
        for (auto& v : vec) {
            auto c = gt.cluster_of(p, v.tweet);
            if (c) {
                v.status = retrieved.insert(*c).second ? TweetStatus::RelevantNew
                                                       : TweetStatus::Redundant;
            } else {
                v.status = gt.grade(p, v.tweet) ? TweetStatus::JudgedNonRelevant
                                                : TweetStatus::Unjudged;
            }
        }
    }
}

int window_gain(std::span<const TweetVerdict> cell, int cap) {
    std::size_t limit = std::min(cell.size(), static_cast<std::size_t>(cap));
    int g = 0;
    for (std::size_t i = 0; i < limit; ++i)
        if (cell[i].status == TweetStatus::RelevantNew) ++g;
    return g;
}

int max_gain_z(const GroundTruth& gt, const EvalConfig& cfg, const ProfileId& profile,
               int window, const std::map<ClusterToken, int>& retrieved_window) {
    auto pit = gt.clusters.find(profile);
    if (pit == gt.clusters.end()) return 0;
    std::set<ClusterToken> available;
    for (const auto& [t, c] : pit->second) {
        auto ep = gt.epoch_of(t);
        if (!ep) continue;
        auto w = cfg.windowing.window_of(*ep);
        if (!w || *w != window) continue;
        auto rit = retrieved_window.find(c);
        if (rit != retrieved_window.end() && rit->second < window) continue;
        available.insert(c);
    }
    return std::min(cfg.cap, static_cast<int>(available.size()));
}

double eg_score(int pushes, int gain, bool silent, Variant v, int cap) {
    if (!silent) return pushes > 0 ? static_cast<double>(gain) / pushes : 0.0;
    switch (v) {
        case Variant::Zero: return 0.0;
        case Variant::One: return pushes == 0 ? 1.0 : 0.0;
        default:
            return std::max(0.0, static_cast<double>(cap - pushes) / cap);
    }
}

double ncg_score(int pushes, int gain, int z, bool silent, Variant v, int cap) {
    if (!silent) return z > 0 ? static_cast<double>(gain) / z : 0.0;
    switch (v) {
        case Variant::Zero: return 0.0;
        case Variant::One: return pushes == 0 ? 1.0 : 0.0;
        default:
            return std::max(0.0, static_cast<double>(cap - pushes) / cap);
    }
}

double gmp_score(int gain, int pain, double alpha) {
    return alpha * gain - (1.0 - alpha) * pain;
}

namespace {

std::map<ClusterToken, std::int64_t> cluster_min_epochs(const GroundTruth& gt,
                                                        const ProfileId& p) {
    std::map<ClusterToken, std::int64_t> out;
    auto pit = gt.clusters.find(p);
    if (pit == gt.clusters.end()) return out;
    for (const auto& [t, c] : pit->second) {
        auto ep = gt.epoch_of(t);
        if (!ep) continue;
        auto it = out.find(c);
        if (it == out.end() || *ep < it->second) out[c] = *ep;
    }
    return out;
}

}  // namespace

ScoreReport evaluate_run(const Run& run, const GroundTruth& gt, const EvalConfig& cfg) {
    Run collapsed = run;
    collapse_run(collapsed);
    CapResult capped = enforce_cap(collapsed, cfg);
    Assignment asg = assign_windows(capped.run, gt, cfg);
    classify(asg, gt);

    ScoreReport r;
    r.run_tag = run.tag;
    r.eg_variants = cfg.eg_variants;
    r.ncg_variants = cfg.ncg_variants;
    r.alphas = cfg.alphas;
    r.warnings = asg.warnings;
    for (const auto& v : capped.violations)
        r.warnings.push_back(
            "cap exceeded for (" + v.profile + ", day " + std::to_string(v.day) +
            "): " + std::to_string(v.pushed) + " pushes, " +
            (cfg.mode == Mode::Strict
                 ? "kept first " + std::to_string(v.kept)
                 : "kept all (official-2016 mis-normalization applies)"));

    int windows = cfg.windowing.window_count;
    for (const ProfileId& p : gt.profiles()) {
        const std::vector<TweetVerdict>* verdicts = nullptr;
        if (auto it = asg.counted.find(p); it != asg.counted.end())
            verdicts = &it->second;

        std::map<ClusterToken, int> retrieved_window;
        std::vector<std::vector<TweetVerdict>> by_window(
            static_cast<std::size_t>(windows));
        ProfileLatency pl;
        pl.profile = p;
        if (verdicts) {
            auto min_ep = cluster_min_epochs(gt, p);
            for (const auto& v : *verdicts) {
                by_window[static_cast<std::size_t>(v.window)].push_back(v);
                if (v.status != TweetStatus::RelevantNew) continue;
                ClusterToken c = *gt.cluster_of(p, v.tweet);
                retrieved_window.emplace(c, v.window);
                pl.latency_sum += v.push_epoch - min_ep.at(c);
                pl.clusters_retrieved += 1;
            }
        }
        pl.flagged = pl.clusters_retrieved == 0;
        r.profiles.push_back(pl);

        for (int j = 0; j < windows; ++j) {
            const auto& list = by_window[static_cast<std::size_t>(j)];
            CellRow cell;
            cell.profile = p;
            cell.window = j;
            cell.pushes = static_cast<int>(list.size());
            cell.gain = window_gain(list, cfg.cap);
            cell.z = max_gain_z(gt, cfg, p, j, retrieved_window);
            int relevant_new = 0;
            for (const auto& v : list)
                if (v.status == TweetStatus::RelevantNew) ++relevant_new;
            cell.pain = cell.pushes - relevant_new;
            cell.silent = cell.z == 0;
            for (Variant v : {Variant::Zero, Variant::One, Variant::Prop}) {
                cell.eg[static_cast<int>(v)] =
                    eg_score(cell.pushes, cell.gain, cell.silent, v, cfg.cap);
                cell.ncg[static_cast<int>(v)] =
                    ncg_score(cell.pushes, cell.gain, cell.z, cell.silent, v, cfg.cap);
            }
            for (double a : cfg.alphas)
                cell.gmp.push_back(gmp_score(cell.gain, cell.pain, a));
            r.cells.push_back(std::move(cell));
        }
    }

    auto mean_over_cells = [&](auto&& get) {
        if (r.cells.empty()) return 0.0;
        double s = 0;
        for (const auto& c : r.cells) s += get(c);
        return s / static_cast<double>(r.cells.size());
    };
    for (Variant v : cfg.eg_variants)
        r.aggregates.emplace_back(eg_key(v), mean_over_cells([v](const CellRow& c) {
                                      return c.eg[static_cast<int>(v)];
                                  }));
    for (Variant v : cfg.ncg_variants)
        r.aggregates.emplace_back(ncg_key(v), mean_over_cells([v](const CellRow& c) {
                                      return c.ncg[static_cast<int>(v)];
                                  }));
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i)
        r.aggregates.emplace_back(gmp_key(cfg.alphas[i]),
                                  mean_over_cells([i](const CellRow& c) {
                                      return c.gmp[i];
                                  }));

    std::vector<double> lat;
    for (const auto& pl : r.profiles)
        lat.push_back(static_cast<double>(pl.latency_sum));
    double lat_mean = 0, lat_median = 0;
    if (!lat.empty()) {
        double s = 0;
        for (double v : lat) s += v;
        lat_mean = s / static_cast<double>(lat.size());
        std::sort(lat.begin(), lat.end());
        std::size_t m = lat.size() / 2;
        lat_median = lat.size() % 2 ? lat[m] : (lat[m - 1] + lat[m]) / 2.0;
    }
    r.aggregates.emplace_back("Latency-mean", lat_mean);
    r.aggregates.emplace_back("Latency-median", lat_median);
    return r;
}

std::vector<RankedRun> rank_runs(const std::vector<ScoreReport>& reports,
                                 std::string_view metric) {
    bool ascending = is_latency_metric(metric);
    std::vector<RankedRun> rows;
    for (const auto& rep : reports) {
        const double* v = rep.aggregate(metric);
        if (!v) throw std::invalid_argument("unknown metric key: " + std::string(metric));
        rows.push_back({0, rep.run_tag, *v});
    }
    std::sort(rows.begin(), rows.end(),
              [ascending](const RankedRun& a, const RankedRun& b) {
                  if (a.score != b.score)
                      return ascending ? a.score < b.score : a.score > b.score;
                  return a.tag < b.tag;
              });
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].rank = (i > 0 && rows[i].score == rows[i - 1].score)
                           ? rows[i - 1].rank
                           : static_cast<int>(i) + 1;
    return rows;
}

}  // namespace pusheval
