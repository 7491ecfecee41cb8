#include "pusheval/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace pusheval {

bool GroundTruth::is_relevant(const ProfileId& p, const TweetId& t) const {
    auto g = grade(p, t);
    return g && *g >= 1;
}

std::optional<int> GroundTruth::grade(const ProfileId& p, const TweetId& t) const {
    auto pit = judgments.find(p);
    if (pit == judgments.end()) return std::nullopt;
    auto tit = pit->second.find(t);
    if (tit == pit->second.end()) return std::nullopt;
    return tit->second;
}

std::optional<ClusterToken> GroundTruth::cluster_of(const ProfileId& p,
                                                    const TweetId& t) const {
    auto pit = clusters.find(p);
    if (pit == clusters.end()) return std::nullopt;
    auto tit = pit->second.find(t);
    if (tit == pit->second.end()) return std::nullopt;
    return tit->second;
}

std::optional<std::int64_t> GroundTruth::epoch_of(const TweetId& t) const {
    auto it = epochs.find(t);
    if (it == epochs.end()) return std::nullopt;
    return it->second;
}

std::vector<ProfileId> GroundTruth::profiles() const {
    std::vector<ProfileId> out;
    for (const auto& [p, _] : judgments) out.push_back(p);
    for (const auto& [p, _] : clusters)
        if (!judgments.contains(p)) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t collapse_run(Run& run) {
    std::map<std::pair<ProfileId, TweetId>, std::int64_t> earliest;
    for (const auto& pr : run.pushes) {
        auto key = std::make_pair(pr.profile, pr.tweet);
        auto it = earliest.find(key);
        if (it == earliest.end() || pr.push_epoch < it->second)
            earliest[key] = pr.push_epoch;
    }
    std::size_t removed = run.pushes.size() - earliest.size();
    run.pushes.clear();
    for (const auto& [key, epoch] : earliest)
        run.pushes.push_back({key.first, key.second, epoch});
    std::sort(run.pushes.begin(), run.pushes.end(),
              [](const PushRecord& a, const PushRecord& b) {
                  return std::tie(a.profile, a.push_epoch, a.tweet) <
                         std::tie(b.profile, b.push_epoch, b.tweet);
              });
    return removed;
}

std::int64_t Windowing::raw_index(std::int64_t epoch) const {
    std::int64_t d = epoch - start_epoch;
    // Floor division: C++ integer division truncates toward zero.
    std::int64_t q = d / window_seconds;
    if (d % window_seconds != 0 && (d < 0) != (window_seconds < 0)) --q;
    return q;
}

std::optional<int> Windowing::window_of(std::int64_t epoch) const {
    std::int64_t idx = raw_index(epoch);
    if (idx < 0 || idx >= window_count) return std::nullopt;
    return static_cast<int>(idx);
}

std::string_view to_string(Mode m) {
    return m == Mode::Strict ? "strict" : "official-2016";
}

std::optional<Mode> mode_from_string(std::string_view s) {
    if (s == "strict") return Mode::Strict;
    if (s == "official-2016") return Mode::Official2016;
    return std::nullopt;
}

std::string_view variant_suffix(Variant v) {
    switch (v) {
        case Variant::Zero: return "0";
        case Variant::One: return "1";
        default: return "p";
    }
}

std::string eg_key(Variant v) { return std::string("EG-") + std::string(variant_suffix(v)); }
std::string ncg_key(Variant v) { return std::string("nCG-") + std::string(variant_suffix(v)); }

std::string gmp_key(double alpha) {
    // "GMP." + the two rounded fractional digits of alpha: 0.5 -> GMP.50.
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", alpha);
    const char* dot = buf;
    while (*dot && *dot != '.') ++dot;
    return std::string("GMP.") + std::string(*dot == '.' ? dot + 1 : "00");
}

bool is_latency_metric(std::string_view key) {
    return key.substr(0, 7) == "Latency";
}

const double* ScoreReport::aggregate(std::string_view key) const {
    for (const auto& [k, v] : aggregates)
        if (k == key) return &v;
    return nullptr;
}

namespace {
bool clean_token(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') return false;
    return true;
}
}  // namespace

std::vector<Violation> validate_ground_truth(const GroundTruth& gt) {
    std::vector<Violation> out;
    for (const auto& [p, tweets] : gt.judgments) {
        if (!clean_token(p))
            out.push_back({"empty-id", p, "", "profile id empty or has whitespace"});
        for (const auto& [t, g] : tweets) {
            if (!clean_token(t))
                out.push_back({"empty-id", p, t, "tweet id empty or has whitespace"});
            if (g < 0)
                out.push_back({"negative-grade", p, t,
                               "grade " + std::to_string(g) + " is negative"});
            if (g >= 1 && !gt.cluster_of(p, t))
                out.push_back({"relevant-but-unclustered", p, t,
                               "relevant tweet has no cluster assignment"});
        }
    }
    for (const auto& [p, tweets] : gt.clusters) {
        for (const auto& [t, c] : tweets) {
            if (!clean_token(c))
                out.push_back({"empty-id", p, t, "cluster token empty or has whitespace"});
            if (!gt.is_relevant(p, t))
                out.push_back({"clustered-but-not-relevant", p, t,
                               "clustered tweet lacks a relevant judgment"});
            if (!gt.epoch_of(t))
                out.push_back({"clustered-without-epoch", p, t,
                               "clustered tweet has no epoch entry"});
        }
    }
    for (const auto& [t, e] : gt.epochs) {
        if (!clean_token(t))
            out.push_back({"empty-id", "", t, "tweet id empty or has whitespace"});
        if (e < 0)
            out.push_back({"negative-epoch", "", t,
                           "epoch " + std::to_string(e) + " is negative"});
    }
    return out;
}

}  // namespace pusheval
