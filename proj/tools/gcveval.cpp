// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

// gcveval: synthetic dataset quality by generalized cross-validation.
//
// Exit codes: 0 success, 2 validation or domain error, 3 runner failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gcv/config.hpp"
#include "gcv/errors.hpp"
#include "gcv/orchestrator.hpp"
#include "gcv/perf_matrix.hpp"
#include "gcv/prep.hpp"
#include "gcv/report.hpp"
#include "gcv/toyworld.hpp"
#include "gcv/util.hpp"

#ifndef GCV_VERSION
#define GCV_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRunner = 3;

struct GlobalFlags {
    fs::path config;
    std::optional<std::uint64_t> seed;
    fs::path cache_dir;
    std::string format = "markdown";
    fs::path output;
    bool terse = false;
    bool keep_going = false;
    bool resume = true;
    bool fresh = false;
    int verbosity = 0;
};

void emit(const fs::path& output, const std::string& text) {
    if (output.empty()) {
        std::cout << text;
    } else {
        gcv::write_file_atomic(output, text);
        spdlog::info("wrote {}", output.string());
    }
}

gcv::ExperimentConfig load_config(const GlobalFlags& g) {
    if (g.config.empty()) throw gcv::ConfigError("--config", "this subcommand needs an experiment config");
    auto cfg = gcv::load_experiment_config(g.config);
    if (g.seed) cfg.split.seed = *g.seed;
    if (!g.cache_dir.empty()) cfg.execution.cache_dir = fs::absolute(g.cache_dir);
    if (g.keep_going) cfg.execution.keep_going = true;
    return cfg;
}

std::string prep_summary(const gcv::PrepResult& result, gcv::ReportFormat format) {
    if (format == gcv::ReportFormat::json) {
        nlohmann::json doc = {{"shared_labels", result.shared_labels.labels()}, {"warnings", result.warnings}};
        nlohmann::json sets = nlohmann::json::array();
        for (const auto& m : result.manifests) {
            sets.push_back({{"dataset_id", m.split.dataset_id},
                            {"role", std::string(gcv::to_string(m.role))},
                            {"train", m.split.train_ids.size()},
                            {"test", m.split.test_ids.size()},
                            {"available_images", m.split.available_images}});
        }
        doc["datasets"] = sets;
        return doc.dump(2) + "\n";
    }
    std::string out = "shared labels:";
    for (const auto& l : result.shared_labels.labels()) out += " " + l;
    out += "\n";
    for (const auto& m : result.manifests) {
        out += m.split.dataset_id + ": train=" + std::to_string(m.split.train_ids.size()) +
               " test=" + std::to_string(m.split.test_ids.size()) +
               " available=" + std::to_string(m.split.available_images) + "\n";
    }
    return out;
}

/// <dir>/<stem>.run.json next to a matrix written by `run`.
fs::path run_summary_path(const fs::path& matrix) {
    return matrix.parent_path() / (matrix.stem().string() + ".run.json");
}

gcv::PrepResult run_prep(const gcv::ExperimentConfig& cfg) {
    return gcv::prepare_datasets(cfg.datasets, gcv::PrepOptions{cfg.split, cfg.splits_dir});
}

int cmd_prep(const GlobalFlags& g) {
    const auto cfg = load_config(g);
    const auto result = run_prep(cfg);
    emit(g.output, prep_summary(result, gcv::parse_report_format(g.format)));
    return kExitOk;
}

int cmd_run(const GlobalFlags& g) {
    const auto cfg = load_config(g);
    bool splits_present = true;
    for (const auto& d : cfg.datasets) {
        splits_present = splits_present && fs::exists(gcv::split_manifest_path(cfg.splits_dir, d.dataset_id));
    }
    if (!splits_present) {
        spdlog::info("split manifests missing under {}; preparing datasets first", cfg.splits_dir.string());
        run_prep(cfg);
    }

    const auto plan = gcv::plan(cfg);
    if (g.fresh || !g.resume) {
        spdlog::info("ignoring cached results under {}", plan.experiment_dir().string());
        fs::remove_all(plan.experiment_dir());
    }
    const auto report = gcv::execute(plan);

    if (!report.failures.empty()) {
        std::cerr << report.failures.size() << " of " << plan.eval_cells()
                  << " cells failed; the matrix is not written until they succeed:\n";
        for (const auto& f : report.failures) std::cerr << "  " << f.cell.describe() << ": " << f.message << "\n";
        return kExitRunner;
    }

    // The matrix document depends on cell values only; run statistics go to the sidecar.
    const auto matrix = gcv::collect(report.cells, plan);
    std::vector<std::string> notes;
    for (const auto& d : plan.datasets) {
        const auto m = gcv::split_manifest_from_json(gcv::read_text_file(d.split_manifest));
        if (m.stats.missing_images_dropped > 0) {
            notes.push_back(d.dataset_id + ": " + std::to_string(m.stats.missing_images_dropped) +
                            " annotated images dropped (image file missing)");
        }
    }
    const fs::path out = g.output.empty() ? cfg.matrix_output : fs::absolute(g.output);
    gcv::write_file_atomic(out, gcv::matrix_to_json(matrix, notes));

    std::vector<std::string> run_notes;
    if (report.cached_cells > 0) {
        run_notes.push_back("cache hits: " + std::to_string(report.cached_cells) + " of " +
                            std::to_string(plan.eval_cells()) + " cells reused");
    }
    const nlohmann::json summary = {{"cells", plan.eval_cells()},
                                    {"cached_cells", report.cached_cells},
                                    {"cached_rows", report.cached_rows},
                                    {"train_invocations", report.train_invocations},
                                    {"eval_invocations", report.eval_invocations},
                                    {"notes", run_notes}};
    gcv::write_file_atomic(run_summary_path(out), summary.dump(2) + "\n");
    std::cerr << "cells: " << plan.eval_cells() << " (cached " << report.cached_cells << "), train runs "
              << report.train_invocations << ", eval runs " << report.eval_invocations << "\n";
    std::cout << out.string() << "\n";
    return kExitOk;
}

gcv::CrossPerformanceMatrix read_matrix(const fs::path& path, std::vector<std::string>* notes) {
    const std::string text = gcv::read_text_file(path);
    if (path.extension() == ".csv") return gcv::matrix_from_csv(text);
    return gcv::matrix_from_json(text, notes);
}

int cmd_score(const GlobalFlags& g, const fs::path& matrix_path, const fs::path& report_path) {
    std::vector<std::string> notes;
    const auto matrix = read_matrix(matrix_path, &notes);
    if (const auto sidecar = run_summary_path(matrix_path); fs::exists(sidecar)) {
        const auto summary = nlohmann::json::parse(gcv::read_text_file(sidecar), nullptr, false);
        if (summary.is_object() && summary.contains("notes") && summary["notes"].is_array()) {
            for (const auto& n : summary["notes"]) {
                if (n.is_string()) notes.push_back(n.get<std::string>());
            }
        }
    }
    const auto report = gcv::build_report(matrix, std::move(notes));
    if (!report_path.empty()) gcv::write_file_atomic(report_path, gcv::report_to_json(report));
    emit(g.output, gcv::render_report(report, gcv::parse_report_format(g.format), g.terse));
    return kExitOk;
}

int cmd_report(const GlobalFlags& g, const fs::path& report_path) {
    const auto report = gcv::report_from_json(gcv::read_text_file(report_path));
    emit(g.output, gcv::render_report(report, gcv::parse_report_format(g.format), g.terse));
    return kExitOk;
}

int cmd_matrix(const GlobalFlags& g, const std::string& action, const fs::path& input) {
    std::vector<std::string> notes;
    if (action == "import") {
        emit(g.output, gcv::matrix_to_json(gcv::matrix_from_csv(gcv::read_text_file(input))));
    } else if (action == "export") {
        emit(g.output, gcv::matrix_to_csv(read_matrix(input, &notes)));
    } else {
        const auto gcv_matrix = gcv::normalize(read_matrix(input, &notes));
        emit(g.output, g.format == "json" ? gcv::gcv_to_json(gcv_matrix) : gcv::render_gcv_markdown(gcv_matrix));
    }
    return kExitOk;
}

fs::path default_runner(const char* argv0) {
    std::error_code ec;
    fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (ec) self = fs::absolute(argv0);
    return self.parent_path() / "gcv_toy_runner";
}

int cmd_toy(const GlobalFlags& g, const fs::path& world_path, const fs::path& out_dir, fs::path runner,
            const char* argv0) {
    if (runner.empty()) runner = default_runner(argv0);
    if (!fs::exists(runner)) throw gcv::ValidationError("toy runner not found at " + runner.string());
    auto world = gcv::toy::world_from_json(gcv::read_text_file(world_path));
    if (g.seed) world.split_seed = *g.seed;
    const auto config = gcv::toy::write_toy_experiment(world, out_dir, runner);
    std::cout << config.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_color_st("gcveval");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);

    CLI::App app{"Evaluate synthetic dataset quality with generalized cross-validation"};
    app.set_version_flag("--version", GCV_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config, "experiment config (JSON)");
    app.add_option("--seed", g.seed, "override the split seed");
    app.add_option("--cache-dir", g.cache_dir, "cache root (overrides config and $" + std::string(gcv::kCacheDirEnv) + ")");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "markdown", "md", "csv"}));
    app.add_option("-o,--output", g.output, "write the primary output here instead of stdout");
    app.add_flag("--terse", g.terse, "print only A_o and S_o");
    app.add_flag("--keep-going", g.keep_going, "record failed cells and continue");
    app.add_flag("--resume,!--no-resume", g.resume, "reuse cached rows and cells (default)");
    app.add_flag("--fresh", g.fresh, "discard cached results for this experiment first");
    app.add_flag("-v,--verbose", g.verbosity, "more logging (repeatable)");

    auto* prep = app.add_subcommand("prep", "harmonize datasets and write split manifests");
    auto* run = app.add_subcommand("run", "train and evaluate the full grid; writes the matrix JSON");

    std::string matrix_action;
    fs::path matrix_input;
    auto* matrix = app.add_subcommand("matrix", "convert or normalize a cross-performance matrix");
    matrix->add_option("action", matrix_action, "import (CSV to JSON), export (to CSV) or normalize")
        ->required()
        ->check(CLI::IsMember({"import", "export", "normalize"}));
    matrix->add_option("input", matrix_input, "matrix file")->required()->check(CLI::ExistingFile);

    fs::path score_input;
    fs::path score_report;
    auto* score = app.add_subcommand("score", "score a matrix and render the quality report");
    score->add_option("matrix", score_input, "matrix JSON or CSV")->required()->check(CLI::ExistingFile);
    score->add_option("--report", score_report, "also save the report document (JSON) here");

    fs::path report_input;
    auto* report = app.add_subcommand("report", "re-render a saved report document");
    report->add_option("report", report_input, "report JSON")->required()->check(CLI::ExistingFile);

    fs::path world_input;
    fs::path toy_out;
    fs::path toy_runner;
    auto* toy = app.add_subcommand("toy", "generate toy datasets and an experiment config");
    toy->add_option("world", world_input, "toy world JSON")->required()->check(CLI::ExistingFile);
    toy->add_option("--out", toy_out, "output directory")->required();
    toy->add_option("--runner", toy_runner, "toy runner binary (default: next to gcveval)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }
    spdlog::set_level(g.verbosity >= 2 ? spdlog::level::debug
                      : g.verbosity == 1 ? spdlog::level::info
                                         : spdlog::level::warn);

    try {
        if (*prep) return cmd_prep(g);
        if (*run) return cmd_run(g);
        if (*matrix) return cmd_matrix(g, matrix_action, matrix_input);
        if (*score) return cmd_score(g, score_input, score_report);
        if (*report) return cmd_report(g, report_input);
        if (*toy) return cmd_toy(g, world_input, toy_out, toy_runner, argv[0]);
    } catch (const gcv::RunnerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRunner;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
