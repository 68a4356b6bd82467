// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcv/annotations.hpp"
#include "gcv/prep.hpp"

namespace gcv {

/// External train/eval contract. Templates are expanded with shell-quoted values.
///   train: {train_manifest} {workdir} {seed}
///   eval:  {model_artifact} {test_manifest} {workdir}
struct RunnerSpec {
    std::string train_command_template;
    std::string eval_command_template;
    int timeout_seconds = 3600;
    std::string metric_name;

    /// Throws ConfigError (field path "runner.*") on a missing placeholder or bad timeout.
    void validate() const;
};

struct ExecutionOptions {
    std::filesystem::path cache_dir;
    std::size_t max_parallel_cells = 1;
    bool parallel_training = false;
    bool keep_going = false;
};

/// Environment variable that overrides the configured cache root.
inline constexpr const char* kCacheDirEnv = "GCV_CACHE_DIR";

struct ExperimentConfig {
    std::filesystem::path config_path;  // absolute; relative paths below resolve against its directory
    std::vector<DatasetManifest> datasets;  // synthetic first
    std::filesystem::path splits_dir;
    SplitOptions split;
    std::optional<RunnerSpec> runner;
    ExecutionOptions execution;
    std::filesystem::path matrix_output;
};

/// Parses an experiment document (schema in docs/config.md). Throws ConfigError
/// naming the offending field path.
ExperimentConfig parse_experiment_config(std::string_view document, const std::filesystem::path& base_dir);

/// Reads and parses `path`, then applies the GCV_CACHE_DIR override.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace gcv
