#pragma once
// Line-oriented readers and writers for the four file kinds (qrels,
// clusters, epochs, runs) plus score-report serialization. Parsers are
// total: bad lines are skipped and reported as diagnostics, never thrown.

#include <iosfwd>
#include <string>
#include <vector>

#include "pusheval/model.hpp"

namespace pusheval {

struct ParseDiagnostic {
    enum class Kind { Malformed, Duplicate, Conflict };
    std::string file;
    int line = 0;  // 1-based; 0 when unknown (e.g. merge conflicts)
    Kind kind = Kind::Malformed;
    std::string message;
};

std::string_view to_string(ParseDiagnostic::Kind k);

struct QrelsResult {
    std::map<ProfileId, std::map<TweetId, int>> judgments;
    std::vector<ParseDiagnostic> diagnostics;
};
// Lines: profile <field> tweet grade. Conflicting regrades keep the max.
QrelsResult parse_qrels(std::istream& in, const std::string& file = "");

struct ClustersResult {
    std::map<ProfileId, std::map<TweetId, ClusterToken>> clusters;
    std::vector<ParseDiagnostic> diagnostics;
};
// Lines: profile cluster tweet. A tweet keeps its first assignment.
ClustersResult parse_clusters(std::istream& in, const std::string& file = "");

struct EpochsResult {
    EpochMap epochs;
    std::vector<ParseDiagnostic> diagnostics;
};
// Lines: tweet epoch. Conflicting entries keep the minimum epoch.
EpochsResult parse_epochs(std::istream& in, const std::string& file = "");

struct RunResult {
    Run run;  // collapsed: one push per (profile, tweet), earliest epoch
    std::vector<ParseDiagnostic> diagnostics;
};
// Lines: profile tweet push_epoch [runtag]. All tagged lines must agree on
// the tag (first one wins otherwise); untagged files use default_tag.
RunResult parse_run(std::istream& in, const std::string& default_tag,
                    const std::string& file = "");

// Supplement entries are added unless the base already has the tweet; on a
// disagreeing duplicate the base wins and a conflict diagnostic is emitted.
EpochMap merge_epochs(const EpochMap& base, const EpochMap& supplement,
                      std::vector<ParseDiagnostic>* diagnostics = nullptr);

// Canonical writers; parse(write(x)) == x for valid values.
void write_qrels(std::ostream& out,
                 const std::map<ProfileId, std::map<TweetId, int>>& judgments);
void write_clusters(std::ostream& out,
                    const std::map<ProfileId, std::map<TweetId, ClusterToken>>& clusters);
void write_epochs(std::ostream& out, const EpochMap& epochs);
void write_run(std::ostream& out, const Run& run);

enum class ReportFormat { Tsv, Json };

// TSV: header, one row per cell, then #latency and #aggregate rows.
// JSON: one document with "run", "cells", "profiles", "aggregates" keys.
// All floating values carry exactly six decimal places.
void write_report(std::ostream& out, const ScoreReport& report, ReportFormat fmt);

// Inverse of the JSON form of write_report.
ScoreReport read_report_json(std::istream& in);

// Locale-independent fixed formatting helpers used by every writer.
std::string format_fixed(double v);  // 6 decimal places
}  // namespace pusheval
