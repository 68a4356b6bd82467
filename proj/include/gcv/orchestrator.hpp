// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcv/config.hpp"
#include "gcv/errors.hpp"
#include "gcv/perf_matrix.hpp"

namespace gcv {

struct CellResult {
    std::string train_id;
    std::string test_id;
    MetricValue metric;
    std::string runner_fingerprint;
    double wall_time_seconds = 0.0;
    std::string completed_at;

    bool operator==(const CellResult&) const = default;
};

std::string cell_result_to_json(const CellResult& cell);
CellResult cell_result_from_json(std::string_view document);

struct PlannedDataset {
    std::string dataset_id;
    DatasetRole role = DatasetRole::reference;
    std::filesystem::path split_manifest;
    std::uint64_t seed = 0;
    std::string manifest_digest;  // SHA-256 of the split manifest bytes
};

/// A validated experiment: N+1 training jobs and (N+1)^2 evaluation cells.
struct ExperimentPlan {
    std::vector<PlannedDataset> datasets;  // synthetic first
    RunnerSpec runner;
    ExecutionOptions execution;

    std::vector<std::string> dataset_ids() const;
    std::size_t train_jobs() const noexcept { return datasets.size(); }
    std::size_t eval_cells() const noexcept { return datasets.size() * datasets.size(); }

    /// Cache directory name; depends only on the training template.
    std::string experiment_fingerprint() const;
    /// Training template, seed and training split manifest of row `train`.
    std::string row_fingerprint(std::size_t train) const;
    /// Row fingerprint, eval template, metric name and test split manifest.
    std::string cell_fingerprint(std::size_t train, std::size_t test) const;

    std::filesystem::path experiment_dir() const;
    std::filesystem::path row_dir(std::size_t train) const;
    std::filesystem::path artifact_dir(std::size_t train) const;
    std::filesystem::path cell_path(std::size_t train, std::size_t test) const;
};

/// Reads the split manifests named by the config. Throws ConfigError when the
/// runner section is absent and MissingSplit when a manifest does not exist.
ExperimentPlan plan(const ExperimentConfig& config);

struct CellFailure {
    CellRef cell;
    std::string message;
};

struct ExecutionReport {
    std::vector<CellResult> cells;  // row-major plan order
    std::vector<CellFailure> failures;
    std::size_t train_invocations = 0;
    std::size_t eval_invocations = 0;
    std::size_t cached_rows = 0;
    std::size_t cached_cells = 0;

    std::size_t invocations() const noexcept { return train_invocations + eval_invocations; }
};

struct ExecuteHooks {
    /// Called after each freshly computed cell is persisted. Throwing aborts the
    /// run: no further jobs start and execute rethrows once in-flight jobs end.
    std::function<void(const CellResult&)> on_cell_persisted;
};

/// Trains each dataset once, evaluates every model on every test split and
/// persists each cell as it completes. Valid cached rows and cells are reused.
/// Without keep_going the first RunnerError is rethrown; with it, failures are
/// listed in the report and the cells stay absent.
ExecutionReport execute(const ExperimentPlan& plan, const ExecuteHooks& hooks = {});

/// Assembles the cross-performance matrix in plan order (order-insensitive input).
CrossPerformanceMatrix collect(std::span<const CellResult> results, const ExperimentPlan& plan);

/// Parses the final non-empty stdout line {"metric_name": s, "value": x}.
/// Throws ProtocolError for `cell` on any violation.
MetricValue parse_runner_result(std::string_view stdout_text, const std::string& expected_metric, const CellRef& cell);

}  // namespace gcv
