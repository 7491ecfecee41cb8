#include "pusheval/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <tuple>

#include "pusheval/rng.hpp"

namespace pusheval {

namespace {

constexpr std::uint64_t kGtStream = 0x6774;   // ground-truth streams
constexpr std::uint64_t kRunStream = 0x52;    // run streams

std::string profile_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%03d", i + 1);
    return buf;
}

std::string tweet_name(int profile_idx, int serial) {
    // Opaque numeric token; profiles own disjoint ranges so adding a
    // profile never renames existing tweets.
    return std::to_string(static_cast<long long>(profile_idx + 1) * 1000000 + serial);
}

}  // namespace

GroundTruth gen_ground_truth(const SynthSpec& spec) {
    GroundTruth gt;
    for (int pi = 0; pi < spec.profiles; ++pi) {
        Rng rng(mix_seed({spec.seed, kGtStream, static_cast<std::uint64_t>(pi)}));
        ProfileId profile = profile_name(pi);
        int serial = 0;

        std::vector<int> non_silent;
        for (int j = 0; j < spec.windows; ++j)
            if (!rng.chance(spec.silent_rate)) non_silent.push_back(j);

        auto epoch_in = [&](int window) {
            return spec.start_epoch + window * spec.window_seconds +
                   rng.int64_in(0, spec.window_seconds - 1);
        };

        if (!non_silent.empty()) {
            int n_clusters =
                rng.int_in(spec.clusters_per_profile.lo, spec.clusters_per_profile.hi);
            std::vector<int> coverage = non_silent;
            rng.shuffle(coverage);
            std::size_t slot = 0;
            for (int c = 0; c < n_clusters; ++c) {
                ClusterToken token = "c" + std::to_string(c + 1);
                int n_tweets =
                    rng.int_in(spec.tweets_per_cluster.lo, spec.tweets_per_cluster.hi);
                for (int t = 0; t < n_tweets; ++t) {
                    int window = slot < coverage.size()
                                     ? coverage[slot]
                                     : non_silent[rng.below(non_silent.size())];
                    ++slot;
                    TweetId id = tweet_name(pi, ++serial);
                    gt.judgments[profile][id] = 1 + static_cast<int>(rng.below(2));
                    gt.clusters[profile][id] = token;
                    gt.epochs[id] = epoch_in(window);
                }
            }
        }

        for (int j = 0; j < spec.windows; ++j) {
            if (!rng.chance(spec.background_rate)) continue;
            TweetId id = tweet_name(pi, ++serial);
            gt.judgments[profile][id] = 0;
            gt.epochs[id] = epoch_in(j);
        }
    }
    return gt;
}

Run gen_run(const GroundTruth& gt, const SystemSpec& sys, const EvalConfig& cfg) {
    Run run;
    run.tag = sys.tag;
    const Windowing& win = cfg.windowing;

    for (const ProfileId& profile : gt.profiles()) {
        // Candidate tweets by creation window, deterministic (epoch, id) order.
        std::vector<std::vector<TweetId>> relevant(static_cast<std::size_t>(win.window_count));
        std::vector<std::vector<TweetId>> background(static_cast<std::size_t>(win.window_count));
        {
            std::vector<std::pair<std::int64_t, TweetId>> ordered;
            if (auto it = gt.judgments.find(profile); it != gt.judgments.end())
                for (const auto& [t, g] : it->second)
                    if (auto ep = gt.epoch_of(t)) ordered.push_back({*ep, t});
            std::sort(ordered.begin(), ordered.end());
            for (const auto& [ep, t] : ordered) {
                auto w = win.window_of(ep);
                if (!w) continue;
                if (gt.is_relevant(profile, t))
                    relevant[static_cast<std::size_t>(*w)].push_back(t);
                else
                    background[static_cast<std::size_t>(*w)].push_back(t);
            }
        }

        std::set<TweetId> pushed;
        std::set<ClusterToken> pushed_clusters;
        auto push = [&](Rng& rng, const TweetId& t) {
            std::int64_t creation = *gt.epoch_of(t);
            run.pushes.push_back(
                {profile, t, creation + rng.int64_in(sys.latency.lo, sys.latency.hi)});
            pushed.insert(t);
            if (auto c = gt.cluster_of(profile, t)) pushed_clusters.insert(*c);
        };
        auto pick = [&](Rng& rng, const std::vector<TweetId>& pool,
                        auto&& eligible) -> const TweetId* {
            std::vector<const TweetId*> open;
            for (const TweetId& t : pool)
                if (!pushed.contains(t) && eligible(t)) open.push_back(&t);
            if (open.empty()) return nullptr;
            return open[rng.below(open.size())];
        };

        for (int j = 0; j < win.window_count; ++j) {
            Rng rng(mix_seed({sys.seed, kRunStream, fnv1a64(profile),
                              static_cast<std::uint64_t>(j)}));
            const auto& rel = relevant[static_cast<std::size_t>(j)];
            const auto& bg = background[static_cast<std::size_t>(j)];
            bool wall_silent = rel.empty();
            if (wall_silent && rng.chance(sys.silence_respect)) continue;

            int budget = std::min(cfg.cap, rng.int_in(sys.verbosity.lo, sys.verbosity.hi));
            for (int k = 0; k < budget; ++k) {
                if (rng.chance(sys.precision)) {
                    // Prefer a cluster this run has not touched yet.
                    const TweetId* t = pick(rng, rel, [&](const TweetId& id) {
                        return !pushed_clusters.contains(*gt.cluster_of(profile, id));
                    });
                    if (!t) t = pick(rng, rel, [](const TweetId&) { return true; });
                    if (t) push(rng, *t);
                } else {
                    const TweetId* t = pick(rng, bg, [](const TweetId&) { return true; });
                    if (t) push(rng, *t);
                }
            }
        }
    }

    // Latency can spill pushes into the next day; re-impose the cap on the
    // final push-day grouping so generated runs are always compliant.
    std::map<std::pair<ProfileId, std::int64_t>, std::vector<PushRecord>> by_day;
    for (const auto& pr : run.pushes)
        by_day[{pr.profile, win.raw_index(pr.push_epoch)}].push_back(pr);
    run.pushes.clear();
    for (auto& [key, vec] : by_day) {
        std::sort(vec.begin(), vec.end(), [](const PushRecord& a, const PushRecord& b) {
            return std::tie(a.push_epoch, a.tweet) < std::tie(b.push_epoch, b.tweet);
        });
        if (vec.size() > static_cast<std::size_t>(cfg.cap))
            vec.resize(static_cast<std::size_t>(cfg.cap));
        run.pushes.insert(run.pushes.end(), vec.begin(), vec.end());
    }
    collapse_run(run);
    return run;
}

}  // namespace pusheval
