// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcv {

// Input, configuration or domain errors. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failures reported by (or about) external runner processes. Exit code 3.
class RunnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- annotation harmonization ------------------------------------------------

class MalformedLine : public ValidationError {
public:
    MalformedLine(std::string file, std::size_t line, std::string reason)
        : ValidationError(file + ":" + std::to_string(line) + ": " + reason),
          file_(std::move(file)), line_(line), reason_(std::move(reason)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string file_;
    std::size_t line_;
    std::string reason_;
};

class UnknownImageDimension : public ValidationError {
public:
    explicit UnknownImageDimension(std::string image_id)
        : ValidationError("no image dimension entry for '" + image_id + "'"), image_id_(std::move(image_id)) {}
    const std::string& image_id() const noexcept { return image_id_; }

private:
    std::string image_id_;
};

class EmptyIntersection : public ValidationError {
public:
    EmptyIntersection()
        : ValidationError("label spaces have no category in common; datasets cannot be compared") {}
};

class InsufficientSamples : public ValidationError {
public:
    InsufficientSamples(std::string dataset_id, std::size_t needed, std::size_t available)
        : ValidationError("dataset '" + dataset_id + "' needs " + std::to_string(needed) +
                          " training samples but only " + std::to_string(available) + " are available"),
          dataset_id_(std::move(dataset_id)), needed_(needed), available_(available) {}

    const std::string& dataset_id() const noexcept { return dataset_id_; }
    std::size_t needed() const noexcept { return needed_; }
    std::size_t available() const noexcept { return available_; }

private:
    std::string dataset_id_;
    std::size_t needed_;
    std::size_t available_;
};

// ---- matrices -----------------------------------------------------------------

class MissingCell : public ValidationError {
public:
    MissingCell(std::string train_id, std::string test_id)
        : ValidationError("missing cell (train=" + train_id + ", test=" + test_id + ")"),
          train_id_(std::move(train_id)), test_id_(std::move(test_id)) {}
    const std::string& train_id() const noexcept { return train_id_; }
    const std::string& test_id() const noexcept { return test_id_; }

private:
    std::string train_id_;
    std::string test_id_;
};

class DuplicateCell : public ValidationError {
public:
    DuplicateCell(std::string train_id, std::string test_id)
        : ValidationError("duplicate cell (train=" + train_id + ", test=" + test_id + ")"),
          train_id_(std::move(train_id)), test_id_(std::move(test_id)) {}
    const std::string& train_id() const noexcept { return train_id_; }
    const std::string& test_id() const noexcept { return test_id_; }

private:
    std::string train_id_;
    std::string test_id_;
};

class MixedMetrics : public ValidationError {
public:
    explicit MixedMetrics(std::vector<std::string> names)
        : ValidationError("cells mix metric names: " + join(names)), names_(std::move(names)) {}
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    static std::string join(const std::vector<std::string>& names) {
        std::string out;
        for (const auto& n : names) {
            if (!out.empty()) out += ", ";
            out += n;
        }
        return out;
    }
    std::vector<std::string> names_;
};

class ZeroDiagonal : public ValidationError {
public:
    explicit ZeroDiagonal(std::string dataset_id)
        : ValidationError("model trained on '" + dataset_id +
                          "' scored zero on its own test set; normalization is undefined"),
          dataset_id_(std::move(dataset_id)) {}
    const std::string& dataset_id() const noexcept { return dataset_id_; }

private:
    std::string dataset_id_;
};

// ---- metrics ------------------------------------------------------------------

class DegenerateWeights : public ValidationError {
public:
    DegenerateWeights()
        : ValidationError("no reference model transfers to the synthetic domain (all reverse ratios are 0)") {}
};

class TooFewReferences : public ValidationError {
public:
    explicit TooFewReferences(std::size_t n)
        : ValidationError("transfer quality requires >= 2 reference datasets, got " + std::to_string(n)), n_(n) {}
    std::size_t count() const noexcept { return n_; }

private:
    std::size_t n_;
};

class UndefinedDominance : public ValidationError {
public:
    UndefinedDominance(std::string from, std::string to)
        : ValidationError("dominance between '" + from + "' and '" + to +
                          "' is undefined (both transfer ratios are 0)"),
          from_(std::move(from)), to_(std::move(to)) {}
    const std::string& from() const noexcept { return from_; }
    const std::string& to() const noexcept { return to_; }

private:
    std::string from_;
    std::string to_;
};

// ---- orchestration ------------------------------------------------------------

class ConfigError : public ValidationError {
public:
    ConfigError(std::string field_path, const std::string& reason)
        : ValidationError("config error at '" + field_path + "': " + reason), field_path_(std::move(field_path)) {}
    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

class MissingSplit : public ValidationError {
public:
    explicit MissingSplit(std::string dataset_id)
        : ValidationError("no split manifest for dataset '" + dataset_id + "' (run `prep` first)"),
          dataset_id_(std::move(dataset_id)) {}
    const std::string& dataset_id() const noexcept { return dataset_id_; }

private:
    std::string dataset_id_;
};

// Identifies one grid cell; test_id is empty for a training job.
struct CellRef {
    std::string train_id;
    std::string test_id;

    std::string describe() const {
        return test_id.empty() ? "train(" + train_id + ")" : "cell(train=" + train_id + ", test=" + test_id + ")";
    }
};

class RunnerFailure : public RunnerError {
public:
    RunnerFailure(CellRef cell, int exit_code, std::string stderr_tail)
        : RunnerError(cell.describe() + ": runner exited with code " + std::to_string(exit_code) +
                      (stderr_tail.empty() ? std::string() : "\n" + stderr_tail)),
          cell_(std::move(cell)), exit_code_(exit_code), stderr_tail_(std::move(stderr_tail)) {}

    const CellRef& cell() const noexcept { return cell_; }
    int exit_code() const noexcept { return exit_code_; }
    const std::string& stderr_tail() const noexcept { return stderr_tail_; }

private:
    CellRef cell_;
    int exit_code_;
    std::string stderr_tail_;
};

class RunnerTimeout : public RunnerError {
public:
    RunnerTimeout(CellRef cell, int timeout_seconds)
        : RunnerError(cell.describe() + ": runner timed out after " + std::to_string(timeout_seconds) + " s"),
          cell_(std::move(cell)) {}
    const CellRef& cell() const noexcept { return cell_; }

private:
    CellRef cell_;
};

class ProtocolError : public RunnerError {
public:
    ProtocolError(CellRef cell, const std::string& reason)
        : RunnerError(cell.describe() + ": runner output violates the result contract: " + reason),
          cell_(std::move(cell)) {}
    const CellRef& cell() const noexcept { return cell_; }

private:
    CellRef cell_;
};

}  // namespace gcv
