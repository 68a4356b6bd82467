// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/perf_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/util.hpp"

namespace gcv {

using nlohmann::json;

MetricValue::MetricValue(double value, std::string metric_name) : value_(value), metric_name_(std::move(metric_name)) {
    if (!std::isfinite(value_) || value_ < 0.0) {
        throw ValidationError("metric value must be finite and non-negative, got " + format_shortest(value_));
    }
}

namespace {

void check_ids(const std::vector<std::string>& ids) {
    if (ids.size() < 2) {
        throw ValidationError("a performance matrix needs the synthetic dataset plus at least one reference");
    }
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (id.empty()) throw ValidationError("dataset ids must be non-empty");
        if (!seen.insert(id).second) throw ValidationError("duplicate dataset id '" + id + "'");
    }
}

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

std::string render_rows(const std::vector<double>& values, std::size_t side, std::string_view indent) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < side; ++i) {
        out += indent;
        out += "  [";
        for (std::size_t j = 0; j < side; ++j) {
            if (j) out += ", ";
            out += format_shortest(values[i * side + j]);
        }
        out += i + 1 < side ? "],\n" : "]\n";
    }
    out += indent;
    out += "]";
    return out;
}

std::string render_ids(const std::vector<std::string>& ids) {
    std::string out = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += quote(ids[i]);
    }
    return out + "]";
}

// Accepts nested rows or a flat row-major array.
std::vector<double> read_grid(const json& grid, std::size_t side, const char* field) {
    std::vector<double> values;
    auto push = [&](const json& v) {
        if (!v.is_number()) throw ValidationError(std::string(field) + " must contain only numbers");
        values.push_back(v.get<double>());
    };
    if (!grid.is_array()) throw ValidationError(std::string(field) + " must be an array");
    if (!grid.empty() && grid.front().is_array()) {
        if (grid.size() != side) throw ValidationError(std::string(field) + " must have one row per dataset id");
        for (const auto& row : grid) {
            if (!row.is_array() || row.size() != side) {
                throw ValidationError(std::string(field) + " rows must have one value per dataset id");
            }
            for (const auto& v : row) push(v);
        }
    } else {
        for (const auto& v : grid) push(v);
    }
    if (values.size() != side * side) throw ValidationError(std::string(field) + " is not a square grid over dataset_ids");
    return values;
}

json parse_json(std::string_view document, const char* what) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

std::vector<std::string> read_ids(const json& doc) {
    if (!doc.contains("dataset_ids") || !doc["dataset_ids"].is_array()) {
        throw ValidationError("'dataset_ids' must be an array of strings");
    }
    std::vector<std::string> ids;
    for (const auto& id : doc["dataset_ids"]) {
        if (!id.is_string()) throw ValidationError("'dataset_ids' must be an array of strings");
        ids.push_back(id.get<std::string>());
    }
    return ids;
}

}  // namespace

CrossPerformanceMatrix::CrossPerformanceMatrix(std::vector<std::string> dataset_ids, std::vector<double> cells,
                                               std::string metric_name)
    : ids_(std::move(dataset_ids)), cells_(std::move(cells)), metric_name_(std::move(metric_name)) {
    check_ids(ids_);
    if (cells_.size() != ids_.size() * ids_.size()) {
        throw ValidationError("matrix has " + std::to_string(cells_.size()) + " cells, expected " +
                              std::to_string(ids_.size() * ids_.size()));
    }
    if (metric_name_.empty()) throw ValidationError("metric_name must be non-empty");
    for (double v : cells_) MetricValue(v, metric_name_);
}

std::size_t CrossPerformanceMatrix::index_of(std::string_view dataset_id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), dataset_id);
    if (it == ids_.end()) throw ValidationError("unknown dataset id '" + std::string(dataset_id) + "'");
    return static_cast<std::size_t>(it - ids_.begin());
}

GcvMatrix::GcvMatrix(std::vector<std::string> dataset_ids, std::vector<double> ratios)
    : ids_(std::move(dataset_ids)), ratios_(std::move(ratios)) {
    check_ids(ids_);
    const std::size_t n = ids_.size();
    if (ratios_.size() != n * n) throw ValidationError("GCV matrix is not square over its dataset ids");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double r = ratios_[i * n + j];
            if (!std::isfinite(r) || r < 0.0) throw ValidationError("GCV ratios must be finite and non-negative");
            if (i == j && r != 1.0) throw ValidationError("GCV diagonal entry for '" + ids_[i] + "' is not 1");
        }
    }
}

CrossPerformanceMatrix build_matrix(std::span<const CellMeasurement> cells, const std::vector<std::string>& dataset_ids) {
    check_ids(dataset_ids);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < dataset_ids.size(); ++i) index[dataset_ids[i]] = i;

    std::set<std::string> names;
    for (const auto& c : cells) names.insert(c.metric.metric_name());
    if (names.size() > 1) throw MixedMetrics({names.begin(), names.end()});

    const std::size_t n = dataset_ids.size();
    std::vector<double> grid(n * n, 0.0);
    std::vector<bool> filled(n * n, false);
    for (const auto& c : cells) {
        const auto row = index.find(c.train_id);
        const auto col = index.find(c.test_id);
        if (row == index.end() || col == index.end()) {
            throw ValidationError("cell (train=" + c.train_id + ", test=" + c.test_id +
                                  ") names a dataset outside the experiment");
        }
        const std::size_t k = row->second * n + col->second;
        if (filled[k]) throw DuplicateCell(c.train_id, c.test_id);
        filled[k] = true;
        grid[k] = c.metric.value();
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!filled[i * n + j]) throw MissingCell(dataset_ids[i], dataset_ids[j]);
        }
    }
    return CrossPerformanceMatrix(dataset_ids, std::move(grid), *names.begin());
}

GcvMatrix normalize(const CrossPerformanceMatrix& matrix) {
    const std::size_t n = matrix.side();
    std::vector<double> ratios(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double diag = matrix.at(i, i);
        if (!(diag > 0.0)) throw ZeroDiagonal(matrix.dataset_ids()[i]);
        for (std::size_t j = 0; j < n; ++j) ratios[i * n + j] = i == j ? 1.0 : matrix.at(i, j) / diag;
    }
    return GcvMatrix(matrix.dataset_ids(), std::move(ratios));
}

std::string matrix_to_json(const CrossPerformanceMatrix& matrix, std::span<const std::string> notes) {
    std::string out = "{\n";
    out += "  \"metric_name\": " + quote(matrix.metric_name()) + ",\n";
    out += "  \"dataset_ids\": " + render_ids(matrix.dataset_ids()) + ",\n";
    out += "  \"cells\": " + render_rows(matrix.cells(), matrix.side(), "  ");
    if (!notes.empty()) {
        out += ",\n  \"notes\": [";
        for (std::size_t i = 0; i < notes.size(); ++i) {
            out += i ? ",\n    " : "\n    ";
            out += quote(notes[i]);
        }
        out += "\n  ]";
    }
    out += "\n}\n";
    return out;
}

CrossPerformanceMatrix matrix_from_json(std::string_view document, std::vector<std::string>* notes) {
    const json doc = parse_json(document, "matrix");
    if (!doc.is_object()) throw ValidationError("matrix document must be a JSON object");
    if (!doc.contains("metric_name") || !doc["metric_name"].is_string()) {
        throw ValidationError("'metric_name' must be a string");
    }
    auto ids = read_ids(doc);
    if (!doc.contains("cells")) throw ValidationError("'cells' is missing");
    auto cells = read_grid(doc["cells"], ids.size(), "cells");
    if (notes) {
        notes->clear();
        if (doc.contains("notes")) {
            for (const auto& n : doc["notes"]) notes->push_back(n.is_string() ? n.get<std::string>() : n.dump());
        }
    }
    return CrossPerformanceMatrix(std::move(ids), std::move(cells), doc["metric_name"].get<std::string>());
}

std::string matrix_to_csv(const CrossPerformanceMatrix& matrix) {
    std::string out = matrix.metric_name();
    for (const auto& id : matrix.dataset_ids()) out += "," + id;
    out += "\n";
    for (std::size_t i = 0; i < matrix.side(); ++i) {
        out += matrix.dataset_ids()[i];
        for (std::size_t j = 0; j < matrix.side(); ++j) out += "," + format_shortest(matrix.at(i, j));
        out += "\n";
    }
    return out;
}

CrossPerformanceMatrix matrix_from_csv(std::string_view document) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in{std::string(document)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        for (std::string f; std::getline(ls, f, ',');) fields.push_back(trim(f));
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw ValidationError("matrix CSV is empty");
    const auto& header = rows.front();
    const std::vector<std::string> ids(header.begin() + 1, header.end());
    if (rows.size() != ids.size() + 1) throw ValidationError("matrix CSV needs one row per dataset id");

    std::vector<double> cells;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != ids.size() + 1) {
            throw ValidationError("matrix CSV row " + std::to_string(i + 1) + " has the wrong number of fields");
        }
        if (row.front() != ids[i - 1]) {
            throw ValidationError("matrix CSV row " + std::to_string(i + 1) + " is labelled '" + row.front() +
                                  "', expected '" + ids[i - 1] + "'");
        }
        for (std::size_t j = 1; j < row.size(); ++j) {
            double v = 0.0;
            const auto& f = row[j];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw ValidationError("matrix CSV value '" + f + "' is not a number");
            }
            cells.push_back(v);
        }
    }
    return CrossPerformanceMatrix(ids, std::move(cells), header.front());
}

std::string gcv_to_json(const GcvMatrix& matrix) {
    std::string out = "{\n";
    out += "  \"dataset_ids\": " + render_ids(matrix.dataset_ids()) + ",\n";
    out += "  \"ratios\": " + render_rows(matrix.ratios(), matrix.side(), "  ") + "\n}\n";
    return out;
}

GcvMatrix gcv_from_json(std::string_view document) {
    const json doc = parse_json(document, "GCV matrix");
    if (!doc.is_object() || !doc.contains("ratios")) throw ValidationError("GCV document needs 'ratios'");
    auto ids = read_ids(doc);
    auto ratios = read_grid(doc["ratios"], ids.size(), "ratios");
    return GcvMatrix(std::move(ids), std::move(ratios));
}

}  // namespace gcv
