// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gcv {

/// One task-metric measurement (e.g. AP50, accuracy). Finite and non-negative.
class MetricValue {
public:
    /// Throws ValidationError for NaN, infinities and negative values.
    MetricValue(double value, std::string metric_name);

    double value() const noexcept { return value_; }
    const std::string& metric_name() const noexcept { return metric_name_; }

    bool operator==(const MetricValue&) const = default;

private:
    double value_;
    std::string metric_name_;
};

struct CellMeasurement {
    std::string train_id;
    std::string test_id;
    MetricValue metric;
};

/// Cross-performance matrix P. Row = training dataset, column = test dataset.
/// Index 0 is the synthetic dataset under test, 1..N the references.
class CrossPerformanceMatrix {
public:
    /// `cells` is row-major with side dataset_ids.size(); requires N >= 1.
    CrossPerformanceMatrix(std::vector<std::string> dataset_ids, std::vector<double> cells, std::string metric_name);

    std::size_t side() const noexcept { return ids_.size(); }
    std::size_t reference_count() const noexcept { return ids_.size() - 1; }
    const std::vector<std::string>& dataset_ids() const noexcept { return ids_; }
    const std::string& metric_name() const noexcept { return metric_name_; }
    const std::vector<double>& cells() const noexcept { return cells_; }

    double at(std::size_t train, std::size_t test) const { return cells_.at(train * side() + test); }
    std::size_t index_of(std::string_view dataset_id) const;

    bool operator==(const CrossPerformanceMatrix&) const = default;

private:
    std::vector<std::string> ids_;
    std::vector<double> cells_;
    std::string metric_name_;
};

/// Generalized cross-validation matrix G: ratios[i][j] = P[i][j] / P[i][i].
class GcvMatrix {
public:
    /// Validates shape, non-negativity and an exactly-1 diagonal.
    GcvMatrix(std::vector<std::string> dataset_ids, std::vector<double> ratios);

    std::size_t side() const noexcept { return ids_.size(); }
    std::size_t reference_count() const noexcept { return ids_.size() - 1; }
    const std::vector<std::string>& dataset_ids() const noexcept { return ids_; }
    const std::vector<double>& ratios() const noexcept { return ratios_; }
    double at(std::size_t train, std::size_t test) const { return ratios_.at(train * side() + test); }

    bool operator==(const GcvMatrix&) const = default;

private:
    std::vector<std::string> ids_;
    std::vector<double> ratios_;
};

/// Assembles the matrix in `dataset_ids` order from exactly one measurement per
/// ordered (train, test) pair. Input order does not matter.
/// Throws MissingCell, DuplicateCell, MixedMetrics, or ValidationError for ids
/// outside `dataset_ids`.
CrossPerformanceMatrix build_matrix(std::span<const CellMeasurement> cells, const std::vector<std::string>& dataset_ids);

/// Divides each row by its diagonal at full precision. Throws ZeroDiagonal.
GcvMatrix normalize(const CrossPerformanceMatrix& matrix);

// ---- interchange ----------------------------------------------------------------
// JSON: {"metric_name": s, "dataset_ids": [..], "cells": [[row0], [row1], ..], "notes": [..]}
// CSV:  header "<metric_name>,id0,id1,.."; then one "id_i,v,v,.." line per training row.
// Numbers use the shortest decimal form that round-trips to the same double.

std::string matrix_to_json(const CrossPerformanceMatrix& matrix, std::span<const std::string> notes = {});
CrossPerformanceMatrix matrix_from_json(std::string_view document, std::vector<std::string>* notes = nullptr);

std::string matrix_to_csv(const CrossPerformanceMatrix& matrix);
CrossPerformanceMatrix matrix_from_csv(std::string_view document);

// {"dataset_ids": [..], "ratios": [[..], ..]}
std::string gcv_to_json(const GcvMatrix& matrix);
GcvMatrix gcv_from_json(std::string_view document);

}  // namespace gcv
