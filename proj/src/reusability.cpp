#include "pusheval/reusability.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

#include "pusheval/ingest.hpp"
#include "pusheval/metrics.hpp"
#include "pusheval/parallel.hpp"

namespace pusheval {

std::set<std::pair<ProfileId, TweetId>> unique_tweets(const Run& target,
                                                      const std::vector<Run>& all_runs) {
    std::set<std::pair<ProfileId, TweetId>> mine;
    for (const auto& pr : target.pushes) mine.insert({pr.profile, pr.tweet});
    for (const Run& other : all_runs) {
        if (&other == &target || other.tag == target.tag) continue;
        for (const auto& pr : other.pushes) mine.erase({pr.profile, pr.tweet});
    }
    return mine;
}

GroundTruth reduce_ground_truth(const GroundTruth& gt,
                                const std::set<std::pair<ProfileId, TweetId>>& removed,
                                Mode mode) {
    GroundTruth out = gt;
    for (const auto& [p, t] : removed) {
        if (auto it = out.judgments.find(p); it != out.judgments.end()) {
            it->second.erase(t);
            if (it->second.empty()) out.judgments.erase(it);
        }
        if (auto it = out.clusters.find(p); it != out.clusters.end()) {
            it->second.erase(t);
            if (it->second.empty()) out.clusters.erase(it);
        }
    }
    if (mode == Mode::Official2016) {
        // The historical tooling could no longer see a tweet once it left
        // the pool; mirror that by dropping orphaned epoch entries.
        for (const auto& [p, t] : removed) {
            bool judged = false;
            for (const auto& [_, tweets] : out.judgments)
                if (tweets.contains(t)) {
                    judged = true;
                    break;
                }
            if (!judged) out.epochs.erase(t);
        }
    }
    return out;
}

namespace {

int rank_of(const std::vector<RankedRun>& ranking, const std::string& tag) {
    for (const auto& r : ranking)
        if (r.tag == tag) return r.rank;
    return 0;
}

double score_of(const std::vector<RankedRun>& ranking, const std::string& tag) {
    for (const auto& r : ranking)
        if (r.tag == tag) return r.score;
    return 0;
}

}  // namespace

LooResult leave_one_out(const std::vector<Run>& runs, const GroundTruth& gt,
                        const EvalConfig& cfg, const std::string& metric, int jobs) {
    if (runs.size() < 2)
        throw std::invalid_argument("leave-one-out needs at least two runs");

    std::vector<ScoreReport> original(runs.size());
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        original[i] = evaluate_run(runs[i], gt, cfg);
    });
    auto orig_ranking = rank_runs(original, metric);

    LooResult result;
    result.rows.resize(runs.size());
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        GroundTruth reduced =
            reduce_ground_truth(gt, unique_tweets(runs[i], runs), cfg.mode);
        std::vector<ScoreReport> reports;
        reports.reserve(runs.size());
        for (const Run& r : runs) reports.push_back(evaluate_run(r, reduced, cfg));
        auto loo_ranking = rank_runs(reports, metric);

        LooRow row;
        row.tag = runs[i].tag;
        row.orig_rank = rank_of(orig_ranking, row.tag);
        row.loo_rank = rank_of(loo_ranking, row.tag);
        row.delta = row.orig_rank - row.loo_rank;
        row.orig_score = score_of(orig_ranking, row.tag);
        row.loo_score = score_of(loo_ranking, row.tag);
        result.rows[i] = row;
    });

    double s = 0;
    for (const auto& row : result.rows) s += row.delta;
    result.mean_delta = s / static_cast<double>(result.rows.size());
    return result;
}

void write_loo_tsv(std::ostream& out, const LooResult& result) {
    out << "run\torig_rank\tloo_rank\tdelta\torig_score\tloo_score\n";
    for (const auto& r : result.rows)
        out << r.tag << '\t' << r.orig_rank << '\t' << r.loo_rank << '\t' << r.delta
            << '\t' << format_fixed(r.orig_score) << '\t' << format_fixed(r.loo_score)
            << '\n';
    out << "#mean_delta\t" << format_fixed(result.mean_delta) << '\n';
}

bool EpochAudit::clean() const { return rows.empty(); }

double EpochAudit::missing_fraction() const {
    std::int64_t missing = 0, total = 0;
    for (const auto& pr : per_run) {
        missing += pr.missing;
        total += pr.total;
    }
    return total > 0 ? static_cast<double>(missing) / static_cast<double>(total) : 0.0;
}

EpochAudit audit_epoch(const GroundTruth& gt, const std::vector<Run>& runs) {
    EpochAudit audit;
    for (const Run& run : runs) {
        Run collapsed = run;
        collapse_run(collapsed);
        EpochAudit::PerRun pr{run.tag, 0, static_cast<int>(collapsed.pushes.size())};
        std::vector<EpochAuditRow> rows;
        for (const auto& push : collapsed.pushes)
            if (!gt.epochs.contains(push.tweet))
                rows.push_back({run.tag, push.tweet, push.profile});
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return std::tie(a.profile, a.tweet) < std::tie(b.profile, b.tweet);
        });
        pr.missing = static_cast<int>(rows.size());
        audit.per_run.push_back(pr);
        audit.rows.insert(audit.rows.end(), rows.begin(), rows.end());
    }
    return audit;
}

void write_audit_tsv(std::ostream& out, const EpochAudit& audit) {
    out << "run\tmissing_tweet\tprofile\n";
    for (const auto& r : audit.rows)
        out << r.run << '\t' << r.tweet << '\t' << r.profile << '\n';
    for (const auto& pr : audit.per_run) {
        double frac = pr.total > 0 ? static_cast<double>(pr.missing) / pr.total : 0.0;
        out << "#run\t" << pr.run << '\t' << pr.missing << '\t' << pr.total << '\t'
            << format_fixed(frac) << '\n';
    }
    out << "#total_missing_fraction\t" << format_fixed(audit.missing_fraction()) << '\n';
}

std::vector<ModeComparison> compare_modes(const std::vector<Run>& runs,
                                          const GroundTruth& gt, const EvalConfig& cfg,
                                          const std::string& metric, int jobs) {
    EvalConfig strict_cfg = cfg;
    strict_cfg.mode = Mode::Strict;
    EvalConfig official_cfg = cfg;
    official_cfg.mode = Mode::Official2016;

    std::vector<ScoreReport> strict_reports(runs.size());
    std::vector<ScoreReport> official_reports(runs.size());
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        strict_reports[i] = evaluate_run(runs[i], gt, strict_cfg);
        official_reports[i] = evaluate_run(runs[i], gt, official_cfg);
    });
    auto strict_ranking = rank_runs(strict_reports, metric);
    auto official_ranking = rank_runs(official_reports, metric);

    std::vector<ModeComparison> out;
    for (const Run& run : runs) {
        ModeComparison mc;
        mc.tag = run.tag;
        mc.strict_score = score_of(strict_ranking, run.tag);
        mc.official_score = score_of(official_ranking, run.tag);
        mc.strict_rank = rank_of(strict_ranking, run.tag);
        mc.official_rank = rank_of(official_ranking, run.tag);
        out.push_back(mc);
    }
    return out;
}

void write_modes_tsv(std::ostream& out, const std::vector<ModeComparison>& rows) {
    out << "run\tstrict_score\tofficial_score\tstrict_rank\tofficial_rank\n";
    for (const auto& r : rows)
        out << r.tag << '\t' << format_fixed(r.strict_score) << '\t'
            << format_fixed(r.official_score) << '\t' << r.strict_rank << '\t'
            << r.official_rank << '\n';
}

}  // namespace pusheval
