#include "pusheval/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace pusheval {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_i64(std::string_view s, std::int64_t& v) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e;
}

bool parse_grade(std::string_view s, int& v) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e;
}

// Yields (line_number, content) for data lines; strips \r, skips blank
// lines and lines whose first non-blank character is '#'.
template <class Fn>
void for_each_data_line(std::istream& in, Fn&& fn) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        fn(number, std::string_view(line));
    }
}

ParseDiagnostic diag(const std::string& file, int line, ParseDiagnostic::Kind kind,
                     std::string message) {
    return {file, line, kind, std::move(message)};
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(ParseDiagnostic::Kind k) {
    switch (k) {
        case ParseDiagnostic::Kind::Malformed: return "malformed";
        case ParseDiagnostic::Kind::Duplicate: return "duplicate";
        default: return "conflict";
    }
}

std::string format_fixed(double v) {
    if (v == 0) v = 0;  // squash negative zero
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    (void)ec;
    return std::string(buf, p);
}

QrelsResult parse_qrels(std::istream& in, const std::string& file) {
    QrelsResult r;
    for_each_data_line(in, [&](int line, std::string_view text) {
        auto tok = split_ws(text);
        if (tok.size() != 4) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "expected 4 fields, got " +
                                             std::to_string(tok.size())));
            return;
        }
        int grade = 0;
        if (!parse_grade(tok[3], grade) || grade < 0) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "grade is not a non-negative integer: '" +
                                             std::string(tok[3]) + "'"));
            return;
        }
        ProfileId p(tok[0]);
        TweetId t(tok[2]);
        auto& slot = r.judgments[p];
        auto it = slot.find(t);
        if (it == slot.end()) {
            slot[t] = grade;
        } else if (it->second == grade) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Duplicate,
                                         "repeated judgment for (" + p + ", " + t + ")"));
        } else {
            int kept = std::max(it->second, grade);
            r.diagnostics.push_back(diag(
                file, line, ParseDiagnostic::Kind::Conflict,
                "conflicting grades for (" + p + ", " + t + "): keeping " +
                    std::to_string(kept)));
            it->second = kept;
        }
    });
    return r;
}

ClustersResult parse_clusters(std::istream& in, const std::string& file) {
    ClustersResult r;
    for_each_data_line(in, [&](int line, std::string_view text) {
        auto tok = split_ws(text);
        if (tok.size() != 3) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "expected 3 fields, got " +
                                             std::to_string(tok.size())));
            return;
        }
        ProfileId p(tok[0]);
        ClusterToken c(tok[1]);
        TweetId t(tok[2]);
        auto& slot = r.clusters[p];
        auto it = slot.find(t);
        if (it == slot.end()) {
            slot[t] = c;
        } else {
            r.diagnostics.push_back(diag(
                file, line, ParseDiagnostic::Kind::Duplicate,
                "tweet " + t + " already assigned to cluster " + it->second +
                    " under " + p + "; ignoring " + c));
        }
    });
    return r;
}

EpochsResult parse_epochs(std::istream& in, const std::string& file) {
    EpochsResult r;
    for_each_data_line(in, [&](int line, std::string_view text) {
        auto tok = split_ws(text);
        if (tok.size() != 2) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "expected 2 fields, got " +
                                             std::to_string(tok.size())));
            return;
        }
        std::int64_t epoch = 0;
        if (!parse_i64(tok[1], epoch) || epoch < 0) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "epoch is not a non-negative integer: '" +
                                             std::string(tok[1]) + "'"));
            return;
        }
        TweetId t(tok[0]);
        auto it = r.epochs.find(t);
        if (it == r.epochs.end()) {
            r.epochs[t] = epoch;
        } else if (it->second == epoch) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Duplicate,
                                         "repeated epoch entry for " + t));
        } else {
            std::int64_t kept = std::min(it->second, epoch);
            r.diagnostics.push_back(diag(
                file, line, ParseDiagnostic::Kind::Conflict,
                "conflicting epochs for " + t + ": keeping " + std::to_string(kept)));
            it->second = kept;
        }
    });
    return r;
}

RunResult parse_run(std::istream& in, const std::string& default_tag,
                    const std::string& file) {
    RunResult r;
    std::string tag;
    std::map<std::pair<ProfileId, TweetId>, std::int64_t> earliest;
    for_each_data_line(in, [&](int line, std::string_view text) {
        auto tok = split_ws(text);
        if (tok.size() != 3 && tok.size() != 4) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "expected 3 or 4 fields, got " +
                                             std::to_string(tok.size())));
            return;
        }
        std::int64_t epoch = 0;
        if (!parse_i64(tok[2], epoch) || epoch < 0) {
            r.diagnostics.push_back(diag(file, line, ParseDiagnostic::Kind::Malformed,
                                         "push epoch is not a non-negative integer: '" +
                                             std::string(tok[2]) + "'"));
            return;
        }
        if (tok.size() == 4) {
            std::string line_tag(tok[3]);
            if (tag.empty()) {
                tag = line_tag;
            } else if (line_tag != tag) {
                r.diagnostics.push_back(diag(
                    file, line, ParseDiagnostic::Kind::Conflict,
                    "run tag '" + line_tag + "' conflicts with '" + tag +
                        "'; keeping '" + tag + "'"));
            }
        }
        auto key = std::make_pair(ProfileId(tok[0]), TweetId(tok[1]));
        auto it = earliest.find(key);
        if (it == earliest.end()) {
            earliest[key] = epoch;
        } else {
            r.diagnostics.push_back(diag(
                file, line, ParseDiagnostic::Kind::Duplicate,
                "duplicate push (" + key.first + ", " + key.second +
                    "): keeping earliest epoch " +
                    std::to_string(std::min(it->second, epoch))));
            it->second = std::min(it->second, epoch);
        }
    });
    r.run.tag = tag.empty() ? default_tag : tag;
    for (const auto& [key, epoch] : earliest)
        r.run.pushes.push_back({key.first, key.second, epoch});
    collapse_run(r.run);  // establishes canonical push order
    return r;
}

EpochMap merge_epochs(const EpochMap& base, const EpochMap& supplement,
                      std::vector<ParseDiagnostic>* diagnostics) {
    EpochMap out = base;
    for (const auto& [t, e] : supplement) {
        auto it = out.find(t);
        if (it == out.end()) {
            out[t] = e;
        } else if (it->second != e && diagnostics) {
            diagnostics->push_back({"", 0, ParseDiagnostic::Kind::Conflict,
                                    "supplement epoch for " + t + " (" +
                                        std::to_string(e) + ") ignored; base has " +
                                        std::to_string(it->second)});
        }
    }
    return out;
}

void write_qrels(std::ostream& out,
                 const std::map<ProfileId, std::map<TweetId, int>>& judgments) {
    for (const auto& [p, tweets] : judgments)
        for (const auto& [t, g] : tweets)
            out << p << " Q0 " << t << ' ' << g << '\n';
}

void write_clusters(std::ostream& out,
                    const std::map<ProfileId, std::map<TweetId, ClusterToken>>& clusters) {
    for (const auto& [p, tweets] : clusters)
        for (const auto& [t, c] : tweets)
            out << p << ' ' << c << ' ' << t << '\n';
}

void write_epochs(std::ostream& out, const EpochMap& epochs) {
    for (const auto& [t, e] : epochs) out << t << ' ' << e << '\n';
}

void write_run(std::ostream& out, const Run& run) {
    for (const auto& pr : run.pushes)
        out << pr.profile << ' ' << pr.tweet << ' ' << pr.push_epoch << ' '
            << run.tag << '\n';
}

namespace {

std::vector<std::string> metric_columns(const ScoreReport& r) {
    std::vector<std::string> cols;
    for (Variant v : r.eg_variants) cols.push_back(eg_key(v));
    for (Variant v : r.ncg_variants) cols.push_back(ncg_key(v));
    for (double a : r.alphas) cols.push_back(gmp_key(a));
    return cols;
}

double cell_metric(const CellRow& c, const ScoreReport& r, std::size_t col) {
    std::size_t eg_n = r.eg_variants.size();
    std::size_t ncg_n = r.ncg_variants.size();
    if (col < eg_n) return c.eg[static_cast<int>(r.eg_variants[col])];
    col -= eg_n;
    if (col < ncg_n) return c.ncg[static_cast<int>(r.ncg_variants[col])];
    col -= ncg_n;
    return c.gmp[col];
}

void write_report_tsv(std::ostream& out, const ScoreReport& r) {
    auto cols = metric_columns(r);
    out << "run\tprofile\twindow\tpushes\tgain\tz\tpain\tsilent";
    for (const auto& c : cols) out << '\t' << c;
    out << '\n';
    for (const auto& cell : r.cells) {
        out << r.run_tag << '\t' << cell.profile << '\t' << cell.window << '\t'
            << cell.pushes << '\t' << cell.gain << '\t' << cell.z << '\t'
            << cell.pain << '\t' << (cell.silent ? 1 : 0);
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << '\t' << format_fixed(cell_metric(cell, r, i));
        out << '\n';
    }
    for (const auto& pl : r.profiles)
        out << "#latency\t" << r.run_tag << '\t' << pl.profile << '\t'
            << pl.latency_sum << '\t' << pl.clusters_retrieved << '\t'
            << (pl.flagged ? 1 : 0) << '\n';
    for (const auto& [key, value] : r.aggregates)
        out << "#aggregate\t" << key << '\t' << r.run_tag << '\t'
            << format_fixed(value) << '\n';
}

void write_report_json(std::ostream& out, const ScoreReport& r) {
    auto cols = metric_columns(r);
    out << "{\n  \"run\": \"" << json_escape(r.run_tag) << "\",\n  \"cells\": [";
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        const auto& cell = r.cells[i];
        out << (i ? ",\n    " : "\n    ");
        out << "{\"profile\": \"" << json_escape(cell.profile)
            << "\", \"window\": " << cell.window << ", \"pushes\": " << cell.pushes
            << ", \"gain\": " << cell.gain << ", \"z\": " << cell.z
            << ", \"pain\": " << cell.pain << ", \"silent\": "
            << (cell.silent ? "true" : "false") << ", \"metrics\": {";
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? ", " : "") << '"' << cols[c]
                << "\": " << format_fixed(cell_metric(cell, r, c));
        }
        out << "}}";
    }
    out << (r.cells.empty() ? "]" : "\n  ]") << ",\n  \"profiles\": [";
    for (std::size_t i = 0; i < r.profiles.size(); ++i) {
        const auto& pl = r.profiles[i];
        out << (i ? ",\n    " : "\n    ");
        out << "{\"profile\": \"" << json_escape(pl.profile)
            << "\", \"latency_sum\": " << pl.latency_sum
            << ", \"clusters_retrieved\": " << pl.clusters_retrieved
            << ", \"flagged\": " << (pl.flagged ? "true" : "false") << '}';
    }
    out << (r.profiles.empty() ? "]" : "\n  ]") << ",\n  \"aggregates\": {";
    for (std::size_t i = 0; i < r.aggregates.size(); ++i) {
        out << (i ? ",\n    " : "\n    ");
        out << '"' << r.aggregates[i].first
            << "\": " << format_fixed(r.aggregates[i].second);
    }
    out << (r.aggregates.empty() ? "}" : "\n  }") << "\n}\n";
}

}  // namespace

void write_report(std::ostream& out, const ScoreReport& report, ReportFormat fmt) {
    if (fmt == ReportFormat::Tsv)
        write_report_tsv(out, report);
    else
        write_report_json(out, report);
}

ScoreReport read_report_json(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in);
    ScoreReport r;
    r.run_tag = doc.at("run").get<std::string>();

    // Recover the variant/alpha echo from the aggregate keys.
    const auto& aggs = doc.at("aggregates");
    auto has = [&](const std::string& k) { return aggs.contains(k); };
    for (Variant v : {Variant::Zero, Variant::One, Variant::Prop}) {
        if (has(eg_key(v))) r.eg_variants.push_back(v);
        if (has(ncg_key(v))) r.ncg_variants.push_back(v);
    }
    for (auto it = aggs.begin(); it != aggs.end(); ++it) {
        const std::string& key = it.key();
        if (key.rfind("GMP.", 0) == 0)
            r.alphas.push_back(std::stoi(key.substr(4)) / 100.0);
    }

    for (const auto& jc : doc.at("cells")) {
        CellRow cell;
        cell.profile = jc.at("profile").get<std::string>();
        cell.window = jc.at("window").get<int>();
        cell.pushes = jc.at("pushes").get<int>();
        cell.gain = jc.at("gain").get<int>();
        cell.z = jc.at("z").get<int>();
        cell.pain = jc.at("pain").get<int>();
        cell.silent = jc.at("silent").get<bool>();
        const auto& metrics = jc.at("metrics");
        for (Variant v : r.eg_variants)
            cell.eg[static_cast<int>(v)] = metrics.at(eg_key(v)).get<double>();
        for (Variant v : r.ncg_variants)
            cell.ncg[static_cast<int>(v)] = metrics.at(ncg_key(v)).get<double>();
        for (double a : r.alphas) cell.gmp.push_back(metrics.at(gmp_key(a)).get<double>());
        r.cells.push_back(std::move(cell));
    }
    for (const auto& jp : doc.at("profiles")) {
        ProfileLatency pl;
        pl.profile = jp.at("profile").get<std::string>();
        pl.latency_sum = jp.at("latency_sum").get<std::int64_t>();
        pl.clusters_retrieved = jp.at("clusters_retrieved").get<int>();
        pl.flagged = jp.at("flagged").get<bool>();
        r.profiles.push_back(std::move(pl));
    }
    // Canonical aggregate order, reconstructed rather than map order.
    for (Variant v : r.eg_variants) r.aggregates.emplace_back(eg_key(v), aggs.at(eg_key(v)).get<double>());
    for (Variant v : r.ncg_variants) r.aggregates.emplace_back(ncg_key(v), aggs.at(ncg_key(v)).get<double>());
    for (double a : r.alphas) r.aggregates.emplace_back(gmp_key(a), aggs.at(gmp_key(a)).get<double>());
    if (has("Latency-mean")) r.aggregates.emplace_back("Latency-mean", aggs.at("Latency-mean").get<double>());
    if (has("Latency-median")) r.aggregates.emplace_back("Latency-median", aggs.at("Latency-median").get<double>());
    return r;
}

}  // namespace pusheval
