// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/report.hpp"

#include <algorithm>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/util.hpp"

#ifndef GCV_VERSION
#define GCV_VERSION "0.0.0"
#endif

namespace gcv {

using nlohmann::json;

namespace {

json grid(const std::vector<double>& values, std::size_t side) {
    json rows = json::array();
    for (std::size_t i = 0; i < side; ++i) {
        rows.push_back(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(i * side),
                                           values.begin() + static_cast<std::ptrdiff_t>((i + 1) * side)));
    }
    return rows;
}

std::vector<double> flatten(const json& rows) {
    std::vector<double> out;
    for (const auto& row : rows) {
        for (const auto& v : row) out.push_back(v.get<double>());
    }
    return out;
}

std::string table_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
}

std::string table_rule(std::size_t columns) {
    std::string out = "|";
    for (std::size_t i = 0; i < columns; ++i) out += "---|";
    return out + "\n";
}

std::string s_o_text(const QualityScores& s) { return s.s_o ? format_score(*s.s_o) : std::string(kTransferUnavailable); }

}  // namespace

QualityReport build_report(const CrossPerformanceMatrix& matrix, std::vector<std::string> notes) {
    GcvMatrix gcv = normalize(matrix);
    QualityScores scores = score(gcv);
    std::vector<std::string> warnings = std::move(notes);
    const auto& ids = gcv.dataset_ids();
    for (std::size_t i = 0; i < gcv.side(); ++i) {
        for (std::size_t j = 0; j < gcv.side(); ++j) {
            if (i != j && gcv.at(i, j) > 1.0) {
                warnings.push_back("R[" + ids[i] + " -> " + ids[j] + "] = " + format_fixed(gcv.at(i, j), 3) +
                                   " exceeds 1 (kept as is)");
            }
        }
    }
    ReportMetadata meta{matrix.metric_name(), ids, utc_timestamp(), GCV_VERSION};
    return QualityReport{std::move(meta), matrix, std::move(gcv), std::move(scores), std::move(warnings)};
}

std::string report_to_json(const QualityReport& r) {
    const auto& s = r.scores;
    const std::vector<std::string> refs(r.metadata.dataset_ids.begin() + 1, r.metadata.dataset_ids.end());
    json transfer = nullptr;
    if (s.transfer) {
        const auto& t = *s.transfer;
        json dominance = json::array();
        for (std::size_t i = 0; i < t.references; ++i) {
            for (std::size_t j = 0; j < t.references; ++j) {
                if (i != j) dominance.push_back({{"from", refs[i]}, {"to", refs[j]}, {"value", t.c(i, j)}});
            }
        }
        transfer = {{"dominance", dominance},
                    {"raw", t.raw},
                    {"normalized", t.normalized},
                    {"normalization", kTransferNormalization}};
    }
    const json doc = {
        {"report", "gcv-quality-report"},
        {"version", 1},
        {"metadata",
         {{"metric_name", r.metadata.metric_name},
          {"dataset_ids", r.metadata.dataset_ids},
          {"synthetic_id", r.metadata.dataset_ids.front()},
          {"generated_at", r.metadata.generated_at},
          {"tool_version", r.metadata.tool_version}}},
        {"cross_performance", grid(r.performance.cells(), r.performance.side())},
        {"gcv", grid(r.gcv.ratios(), r.gcv.side())},
        {"scores",
         {{"a_o", s.a_o},
          {"s_o", s.s_o ? json(*s.s_o) : json(nullptr)},
          {"s_o_status", s.s_o ? "ok" : std::string(kTransferUnavailable)},
          {"references", refs},
          {"simulation", {{"reverse_ratios", s.simulation.reverse_ratios}, {"weights", s.simulation.weights}}},
          {"transfer", transfer},
          {"matrix_fingerprint", s.matrix_fingerprint}}},
        {"warnings", r.warnings},
    };
    return doc.dump(2) + "\n";
}

QualityReport report_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        if (doc.value("report", "") != "gcv-quality-report") throw ValidationError("not a gcv quality report");
        const auto& meta = doc.at("metadata");
        ReportMetadata m{meta.at("metric_name").get<std::string>(),
                         meta.at("dataset_ids").get<std::vector<std::string>>(),
                         meta.value("generated_at", std::string{}), meta.value("tool_version", std::string{})};
        CrossPerformanceMatrix perf(m.dataset_ids, flatten(doc.at("cross_performance")), m.metric_name);
        GcvMatrix gcv(m.dataset_ids, flatten(doc.at("gcv")));

        const auto& sc = doc.at("scores");
        QualityScores s;
        s.a_o = sc.at("a_o").get<double>();
        if (!sc.at("s_o").is_null()) s.s_o = sc.at("s_o").get<double>();
        s.simulation.reverse_ratios = sc.at("simulation").at("reverse_ratios").get<std::vector<double>>();
        s.simulation.weights = sc.at("simulation").at("weights").get<std::vector<double>>();
        s.matrix_fingerprint = sc.value("matrix_fingerprint", std::string{});
        if (const auto& t = sc.at("transfer"); !t.is_null()) {
            const auto refs = sc.at("references").get<std::vector<std::string>>();
            TransferWeights tw;
            tw.references = refs.size();
            tw.dominance.assign(refs.size() * refs.size(), 0.0);
            auto index = [&](const std::string& id) {
                const auto it = std::find(refs.begin(), refs.end(), id);
                if (it == refs.end()) throw ValidationError("dominance entry names unknown reference '" + id + "'");
                return static_cast<std::size_t>(it - refs.begin());
            };
            for (const auto& e : t.at("dominance")) {
                tw.dominance[index(e.at("from").get<std::string>()) * refs.size() +
                             index(e.at("to").get<std::string>())] = e.at("value").get<double>();
            }
            tw.raw = t.at("raw").get<std::vector<double>>();
            tw.normalized = t.at("normalized").get<std::vector<double>>();
            s.transfer = std::move(tw);
        }
        return QualityReport{std::move(m), std::move(perf), std::move(gcv), std::move(s),
                             doc.value("warnings", std::vector<std::string>{})};
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid quality report: ") + e.what());
    }
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") return ReportFormat::json;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    throw ValidationError("unknown format '" + std::string(name) + "' (expected json, markdown or csv)");
}

std::string format_score(double value) { return format_fixed(value, 2); }

std::string render_gcv_markdown(const GcvMatrix& gcv) {
    std::vector<std::string> header{"Train \\ Test"};
    header.insert(header.end(), gcv.dataset_ids().begin(), gcv.dataset_ids().end());
    std::string out = table_row(header) + table_rule(header.size());
    for (std::size_t i = 0; i < gcv.side(); ++i) {
        std::vector<std::string> row{gcv.dataset_ids()[i]};
        for (std::size_t j = 0; j < gcv.side(); ++j) row.push_back(format_fixed(gcv.at(i, j), 2));
        out += table_row(row);
    }
    return out;
}

namespace {

std::string render_markdown(const QualityReport& r) {
    const auto& ids = r.metadata.dataset_ids;
    const auto& s = r.scores;
    std::string out = "# Synthetic dataset quality report\n\n";
    out += "- metric: `" + r.metadata.metric_name + "`\n";
    out += "- synthetic dataset under test: `" + ids.front() + "`\n";
    out += "- reference datasets:";
    for (std::size_t i = 1; i < ids.size(); ++i) out += " `" + ids[i] + "`";
    out += "\n\n## Scores\n\n";
    out += "- simulation quality A_o = " + format_score(s.a_o) + "\n";
    out += "- transfer quality S_o = " + s_o_text(s) + "\n\n";

    out += "## Cross-performance matrix (rows = train set, columns = test set)\n\n";
    std::vector<std::string> header{"Train \\ Test"};
    header.insert(header.end(), ids.begin(), ids.end());
    out += table_row(header) + table_rule(header.size());
    for (std::size_t i = 0; i < r.performance.side(); ++i) {
        std::vector<std::string> row{ids[i]};
        for (std::size_t j = 0; j < r.performance.side(); ++j) row.push_back(format_shortest(r.performance.at(i, j)));
        out += table_row(row);
    }

    out += "\n## Generalized cross-validation matrix\n\n" + render_gcv_markdown(r.gcv);

    out += "\n## Reference weights\n\n";
    std::vector<std::string> wh{"Reference", "R_io", "w_i"};
    if (s.transfer) wh.insert(wh.end(), {"v_i (raw)", "v_i (normalized)"});
    out += table_row(wh) + table_rule(wh.size());
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        std::vector<std::string> row{ids[i + 1], format_fixed(s.simulation.reverse_ratios[i], 3),
                                     format_fixed(s.simulation.weights[i], 3)};
        if (s.transfer) {
            row.push_back(format_fixed(s.transfer->raw[i], 3));
            row.push_back(format_fixed(s.transfer->normalized[i], 3));
        }
        out += table_row(row);
    }

    if (s.transfer) {
        out += "\n## Pairwise dominance C_ij (row i over column j)\n\n";
        std::vector<std::string> ch{"C_ij"};
        ch.insert(ch.end(), ids.begin() + 1, ids.end());
        out += table_row(ch) + table_rule(ch.size());
        for (std::size_t i = 0; i < s.transfer->references; ++i) {
            std::vector<std::string> row{ids[i + 1]};
            for (std::size_t j = 0; j < s.transfer->references; ++j) {
                row.push_back(i == j ? "-" : format_fixed(s.transfer->c(i, j), 3));
            }
            out += table_row(row);
        }
        out += "\nTransfer weights: " + std::string(kTransferNormalization) + ".\n";
    }

    if (!r.warnings.empty()) {
        out += "\n## Warnings\n\n";
        for (const auto& w : r.warnings) out += "- " + w + "\n";
    }
    out += "\nmatrix fingerprint: `" + s.matrix_fingerprint + "`\n";
    return out;
}

std::string render_csv(const QualityReport& r) {
    const auto& ids = r.metadata.dataset_ids;
    const auto& s = r.scores;
    std::string out = "kind,row,column,value\n";
    auto line = [&](std::string_view kind, std::string_view row, std::string_view col, const std::string& value) {
        out += std::string(kind) + "," + std::string(row) + "," + std::string(col) + "," + value + "\n";
    };
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) line("performance", ids[i], ids[j], format_shortest(r.performance.at(i, j)));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) line("gcv", ids[i], ids[j], format_shortest(r.gcv.at(i, j)));
    }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        line("reverse_ratio", ids[i + 1], ids.front(), format_shortest(s.simulation.reverse_ratios[i]));
        line("w", ids[i + 1], "", format_shortest(s.simulation.weights[i]));
        if (s.transfer) {
            line("v_raw", ids[i + 1], "", format_shortest(s.transfer->raw[i]));
            line("v_normalized", ids[i + 1], "", format_shortest(s.transfer->normalized[i]));
            for (std::size_t j = 0; j + 1 < ids.size(); ++j) {
                if (i != j) line("dominance", ids[i + 1], ids[j + 1], format_shortest(s.transfer->c(i, j)));
            }
        }
    }
    line("score", "A_o", "", format_shortest(s.a_o));
    line("score", "S_o", "", s.s_o ? format_shortest(*s.s_o) : "\"" + std::string(kTransferUnavailable) + "\"");
    return out;
}

}  // namespace

std::string render_report(const QualityReport& r, ReportFormat format, bool terse) {
    if (terse) {
        switch (format) {
            case ReportFormat::json: {
                const json doc = {{"a_o", r.scores.a_o},
                                  {"s_o", r.scores.s_o ? json(*r.scores.s_o) : json(nullptr)}};
                return doc.dump() + "\n";
            }
            case ReportFormat::csv:
                return "A_o,S_o\n" + format_shortest(r.scores.a_o) + "," +
                       (r.scores.s_o ? format_shortest(*r.scores.s_o) : "\"" + std::string(kTransferUnavailable) + "\"") +
                       "\n";
            case ReportFormat::markdown:
                return "A_o = " + format_score(r.scores.a_o) + "\nS_o = " + s_o_text(r.scores) + "\n";
        }
    }
    switch (format) {
        case ReportFormat::json: return report_to_json(r);
        case ReportFormat::markdown: return render_markdown(r);
        case ReportFormat::csv: return render_csv(r);
    }
    return {};
}

}  // namespace gcv
