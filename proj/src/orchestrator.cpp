// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/orchestrator.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "gcv/subprocess.hpp"
#include "gcv/util.hpp"

namespace gcv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string cell_result_to_json(const CellResult& c) {
    const json doc = {{"train_id", c.train_id},
                      {"test_id", c.test_id},
                      {"metric_name", c.metric.metric_name()},
                      {"value", c.metric.value()},
                      {"runner_fingerprint", c.runner_fingerprint},
                      {"wall_time_seconds", c.wall_time_seconds},
                      {"completed_at", c.completed_at}};
    return doc.dump(2) + "\n";
}

CellResult cell_result_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        return CellResult{doc.at("train_id").get<std::string>(),
                          doc.at("test_id").get<std::string>(),
                          MetricValue(doc.at("value").get<double>(), doc.at("metric_name").get<std::string>()),
                          doc.at("runner_fingerprint").get<std::string>(),
                          doc.value("wall_time_seconds", 0.0),
                          doc.value("completed_at", std::string{})};
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid cell result: ") + e.what());
    }
}

std::vector<std::string> ExperimentPlan::dataset_ids() const {
    std::vector<std::string> ids;
    for (const auto& d : datasets) ids.push_back(d.dataset_id);
    return ids;
}

std::string ExperimentPlan::experiment_fingerprint() const {
    return sha256_hex("gcv-experiment-v1\n" + runner.train_command_template).substr(0, 16);
}

std::string ExperimentPlan::row_fingerprint(std::size_t train) const {
    const auto& d = datasets.at(train);
    return sha256_hex("gcv-row-v1\n" + runner.train_command_template + "\n" + std::to_string(d.seed) + "\n" +
                      d.manifest_digest);
}

std::string ExperimentPlan::cell_fingerprint(std::size_t train, std::size_t test) const {
    return sha256_hex("gcv-cell-v1\n" + row_fingerprint(train) + "\n" + runner.eval_command_template + "\n" +
                      runner.metric_name + "\n" + datasets.at(test).manifest_digest);
}

fs::path ExperimentPlan::experiment_dir() const { return execution.cache_dir / experiment_fingerprint(); }
fs::path ExperimentPlan::row_dir(std::size_t train) const { return experiment_dir() / datasets.at(train).dataset_id; }
fs::path ExperimentPlan::artifact_dir(std::size_t train) const { return row_dir(train) / "artifact"; }
fs::path ExperimentPlan::cell_path(std::size_t train, std::size_t test) const {
    return row_dir(train) / (datasets.at(test).dataset_id + ".json");
}

ExperimentPlan plan(const ExperimentConfig& config) {
    if (!config.runner) throw ConfigError("runner", "required section is missing");
    config.runner->validate();
    ExperimentPlan p;
    p.runner = *config.runner;
    p.execution = config.execution;
    if (p.execution.max_parallel_cells == 0) throw ConfigError("execution.max_parallel_cells", "must be positive");
    if (p.execution.cache_dir.empty()) throw ConfigError("execution.cache_dir", "must be set");

    for (const auto& m : config.datasets) {
        const fs::path path = split_manifest_path(config.splits_dir, m.dataset_id);
        if (!fs::exists(path)) throw MissingSplit(m.dataset_id);
        const std::string bytes = read_text_file(path);
        const SplitManifest sm = split_manifest_from_json(bytes);
        if (sm.split.dataset_id != m.dataset_id) {
            throw ConfigError("splits.dir", "manifest " + path.string() + " belongs to '" + sm.split.dataset_id + "'");
        }
        p.datasets.push_back({m.dataset_id, m.role, path, sm.split.seed, sha256_hex(bytes)});
    }
    const auto synthetic = std::count_if(p.datasets.begin(), p.datasets.end(), [](const PlannedDataset& d) {
        return d.role == DatasetRole::synthetic_under_test;
    });
    if (synthetic != 1 || p.datasets.front().role != DatasetRole::synthetic_under_test) {
        throw ConfigError("datasets", "exactly one synthetic_under_test dataset is required");
    }
    return p;
}

MetricValue parse_runner_result(std::string_view text, const std::string& expected_metric, const CellRef& cell) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ProtocolError(cell, "no output on stdout");
    const auto nl = text.find_last_of('\n');
    const std::string line = trim(nl == std::string_view::npos ? text : text.substr(nl + 1));

    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error&) {
        throw ProtocolError(cell, "final stdout line is not JSON: " + line.substr(0, 200));
    }
    if (!doc.is_object()) throw ProtocolError(cell, "final stdout line is not a JSON object");
    if (!doc.contains("metric_name") || !doc["metric_name"].is_string()) {
        throw ProtocolError(cell, "result lacks a string 'metric_name'");
    }
    if (!doc.contains("value") || !doc["value"].is_number()) throw ProtocolError(cell, "result lacks a numeric 'value'");
    const auto name = doc["metric_name"].get<std::string>();
    if (name != expected_metric) {
        throw ProtocolError(cell, "metric_name '" + name + "' does not match the configured '" + expected_metric + "'");
    }
    try {
        return MetricValue(doc["value"].get<double>(), name);
    } catch (const ValidationError& e) {
        throw ProtocolError(cell, e.what());
    }
}

namespace {

// Single pass over the template; unknown {names} are left verbatim.
std::string expand(const std::string& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        const auto close = open == std::string::npos ? std::string::npos : tmpl.find('}', open);
        if (close == std::string::npos) break;
        out.append(tmpl, pos, open - pos);
        const auto it = values.find(tmpl.substr(open + 1, close - open - 1));
        if (it != values.end()) {
            out += shell_quote(it->second);
        } else {
            out.append(tmpl, open, close - open + 1);
        }
        pos = close + 1;
    }
    out.append(tmpl, std::min(pos, tmpl.size()), std::string::npos);
    return out;
}

// Fixed-size worker pool over a FIFO queue.
class TaskPool {
public:
    explicit TaskPool(std::size_t threads) {
        for (std::size_t i = 0; i < threads; ++i) {
            workers_.emplace_back([this] { loop(); });
        }
    }
    TaskPool(const TaskPool&) = delete;
    TaskPool& operator=(const TaskPool&) = delete;
    ~TaskPool() { close_and_join(); }

    void submit(std::function<void()> task) {
        {
            std::lock_guard lock(mu_);
            queue_.push_back(std::move(task));
        }
        cv_.notify_one();
    }

    void close_and_join() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
        workers_.clear();
    }

private:
    void loop() {
        for (;;) {
            std::function<void()> task;
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [this] { return closed_ || !queue_.empty(); });
                if (queue_.empty()) return;
                task = std::move(queue_.front());
                queue_.pop_front();
            }
            task();
        }
    }

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> queue_;
    bool closed_ = false;
    std::vector<std::jthread> workers_;
};

struct RowMarker {
    std::string row_fingerprint;
    double wall_time_seconds = 0.0;
    std::string completed_at;
};

std::optional<RowMarker> read_row_marker(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    try {
        const json doc = json::parse(read_text_file(path));
        return RowMarker{doc.at("row_fingerprint").get<std::string>(), doc.value("wall_time_seconds", 0.0),
                         doc.value("completed_at", std::string{})};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

class Executor {
public:
    Executor(const ExperimentPlan& plan, const ExecuteHooks& hooks)
        : plan_(plan), hooks_(hooks), n_(plan.datasets.size()), slots_(n_ * n_) {}

    ExecutionReport run() {
        {
            TaskPool evals(plan_.execution.max_parallel_cells);
            TaskPool trainers(plan_.execution.parallel_training ? plan_.execution.max_parallel_cells : 1);
            for (std::size_t i = 0; i < n_; ++i) {
                trainers.submit([this, i, &evals] { run_row(i, evals); });
            }
            trainers.close_and_join();
            evals.close_and_join();
        }
        if (abort_) std::rethrow_exception(abort_);
        if (first_error_ && !plan_.execution.keep_going) std::rethrow_exception(first_error_);

        for (auto& slot : slots_) {
            if (slot) report_.cells.push_back(std::move(*slot));
        }
        return std::move(report_);
    }

private:
    bool stopped() const { return stop_.load(); }

    void fail(const CellRef& cell, std::exception_ptr error) {
        std::lock_guard lock(mu_);
        std::string message;
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            message = e.what();
        }
        spdlog::error("{}", message);
        report_.failures.push_back({cell, message});
        if (!first_error_) first_error_ = error;
        if (!plan_.execution.keep_going) stop_ = true;
    }

    void run_row(std::size_t i, TaskPool& evals) {
        if (stopped()) return;
        const auto& id = plan_.datasets[i].dataset_id;
        try {
            ensure_trained(i);
        } catch (const RunnerError&) {
            fail({id, {}}, std::current_exception());
            return;
        } catch (...) {
            abort(std::current_exception());
            return;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (auto cached = cached_cell(i, j)) {
                std::lock_guard lock(mu_);
                ++report_.cached_cells;
                slots_[i * n_ + j] = std::move(*cached);
                continue;
            }
            evals.submit([this, i, j] { run_cell(i, j); });
        }
    }

    void ensure_trained(std::size_t i) {
        const auto& d = plan_.datasets[i];
        const fs::path marker = plan_.row_dir(i) / "train.json";
        const std::string fingerprint = plan_.row_fingerprint(i);
        if (const auto m = read_row_marker(marker); m && m->row_fingerprint == fingerprint) {
            std::lock_guard lock(mu_);
            ++report_.cached_rows;
            return;
        }

        const fs::path artifact = plan_.artifact_dir(i);
        fs::remove_all(artifact);
        fs::create_directories(artifact);
        const std::string command = expand(plan_.runner.train_command_template,
                                           {{"train_manifest", d.split_manifest.string()},
                                            {"workdir", artifact.string()},
                                            {"seed", std::to_string(d.seed)}});
        spdlog::info("train {}: {}", d.dataset_id, command);
        {
            std::lock_guard lock(mu_);
            ++report_.train_invocations;
        }
        const auto result = run_shell_command(command, std::chrono::seconds(plan_.runner.timeout_seconds));
        write_logs(plan_.row_dir(i) / "logs" / "train", result);

        const CellRef ref{d.dataset_id, {}};
        if (result.timed_out) throw RunnerTimeout(ref, plan_.runner.timeout_seconds);
        if (result.exit_code != 0) throw RunnerFailure(ref, result.exit_code, tail_lines(result.err, 20));

        const json doc = {{"row_fingerprint", fingerprint},
                          {"wall_time_seconds", result.wall_seconds},
                          {"completed_at", utc_timestamp()}};
        std::lock_guard lock(mu_);
        write_file_atomic(marker, doc.dump(2) + "\n");
    }

    std::optional<CellResult> cached_cell(std::size_t i, std::size_t j) const {
        const fs::path path = plan_.cell_path(i, j);
        if (!fs::exists(path)) return std::nullopt;
        try {
            auto cell = cell_result_from_json(read_text_file(path));
            if (cell.runner_fingerprint != plan_.cell_fingerprint(i, j) ||
                cell.train_id != plan_.datasets[i].dataset_id || cell.test_id != plan_.datasets[j].dataset_id ||
                cell.metric.metric_name() != plan_.runner.metric_name) {
                return std::nullopt;
            }
            return cell;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    void run_cell(std::size_t i, std::size_t j) {
        if (stopped()) return;
        const auto& train = plan_.datasets[i];
        const auto& test = plan_.datasets[j];
        const CellRef ref{train.dataset_id, test.dataset_id};
        try {
            const fs::path workdir = plan_.row_dir(i) / "eval" / test.dataset_id;
            fs::create_directories(workdir);
            const std::string command = expand(plan_.runner.eval_command_template,
                                               {{"model_artifact", plan_.artifact_dir(i).string()},
                                                {"test_manifest", test.split_manifest.string()},
                                                {"workdir", workdir.string()}});
            {
                std::lock_guard lock(mu_);
                ++report_.eval_invocations;
            }
            const auto result = run_shell_command(command, std::chrono::seconds(plan_.runner.timeout_seconds));
            write_logs(plan_.row_dir(i) / "logs" / test.dataset_id, result);
            if (result.timed_out) throw RunnerTimeout(ref, plan_.runner.timeout_seconds);
            if (result.exit_code != 0) throw RunnerFailure(ref, result.exit_code, tail_lines(result.err, 20));

            CellResult cell{train.dataset_id,
                            test.dataset_id,
                            parse_runner_result(result.out, plan_.runner.metric_name, ref),
                            plan_.cell_fingerprint(i, j),
                            result.wall_seconds,
                            utc_timestamp()};
            {
                std::lock_guard lock(mu_);
                write_file_atomic(plan_.cell_path(i, j), cell_result_to_json(cell));
                slots_[i * n_ + j] = cell;
            }
            if (hooks_.on_cell_persisted) hooks_.on_cell_persisted(cell);
        } catch (const RunnerError&) {
            fail(ref, std::current_exception());
        } catch (...) {
            abort(std::current_exception());
        }
    }

    void abort(std::exception_ptr error) {
        std::lock_guard lock(mu_);
        if (!abort_) abort_ = error;
        stop_ = true;
    }

    void write_logs(const fs::path& stem, const ProcessResult& result) {
        std::lock_guard lock(mu_);
        write_file_atomic(stem.string() + ".stdout.log", result.out);
        write_file_atomic(stem.string() + ".stderr.log", result.err);
    }

    const ExperimentPlan& plan_;
    const ExecuteHooks& hooks_;
    const std::size_t n_;

    std::mutex mu_;  // guards report_, slots_ and every cache write
    std::atomic<bool> stop_{false};
    std::exception_ptr first_error_;
    std::exception_ptr abort_;
    std::vector<std::optional<CellResult>> slots_;
    ExecutionReport report_;
};

}  // namespace

ExecutionReport execute(const ExperimentPlan& plan, const ExecuteHooks& hooks) {
    fs::create_directories(plan.experiment_dir());
    return Executor(plan, hooks).run();
}

CrossPerformanceMatrix collect(std::span<const CellResult> results, const ExperimentPlan& plan) {
    std::vector<CellMeasurement> cells;
    cells.reserve(results.size());
    for (const auto& r : results) cells.push_back({r.train_id, r.test_id, r.metric});
    return build_matrix(cells, plan.dataset_ids());
}

}  // namespace gcv
