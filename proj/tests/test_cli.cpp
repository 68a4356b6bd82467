// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <csignal>
#include <thread>

#include <json.hpp>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "gcv/report.hpp"
#include "gcv/subprocess.hpp"
#include "toy_fixture.hpp"

using namespace gcv;
using test::TempDir;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

ProcessResult gcveval(const std::string& args) {
    return run_shell_command(shell_quote(test::kGcveval.string()) + " " + args, 120s);
}

std::string q(const fs::path& p) { return shell_quote(p.string()); }

bool contains(const std::string& haystack, std::string_view needle) {
    return haystack.find(needle) != std::string::npos;
}

/// Writes the toy world fixture under `dir` and returns the experiment config path.
fs::path toy_experiment(const fs::path& dir, const std::string& world = "zero_shift.json") {
    const auto r = gcveval("toy " + q(test::kFixtureDir / "toy" / world) + " --out " + q(dir));
    REQUIRE(r.exit_code == 0);
    return dir / "experiment.json";
}

/// Rewrites one runner command template in an experiment config.
void set_runner(const fs::path& config, const std::string& key, const std::string& command) {
    auto doc = nlohmann::json::parse(test::slurp(config));
    doc["runner"][key] = command;
    test::write_text(config, doc.dump(2));
}

std::string runner_template(const fs::path& config, const std::string& key) {
    return nlohmann::json::parse(test::slurp(config))["runner"][key].get<std::string>();
}

/// Cell results live at <cache>/<fingerprint>/<train>/<test>.json.
std::size_t cell_files(const fs::path& cache) {
    std::size_t n = 0;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(cache, ec), end; !ec && it != end; it.increment(ec)) {
        const auto rel = fs::relative(it->path(), cache);
        if (std::distance(rel.begin(), rel.end()) == 3 && rel.extension() == ".json" && rel.filename() != "train.json") ++n;
    }
    return n;
}

fs::path copy_corpus(const fs::path& dir) {
    fs::copy(test::kFixtureDir / "sample_corpus", dir / "corpus", fs::copy_options::recursive);
    return dir / "corpus" / "experiment.json";
}

}  // namespace

TEST_CASE("score prints the headline numbers") {
    const auto r = gcveval("score " + q(test::kFixtureDir / "vkitti_table3.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "A_o = 0.49"));
    CHECK(contains(r.out, "S_o = 0.45"));
    CHECK(contains(r.out, "| bdd100k | 1.24 | 0.90 | 1.00 |"));

    const auto terse = gcveval("--terse score " + q(test::kFixtureDir / "vkitti_table3.json"));
    CHECK(terse.out == "A_o = 0.49\nS_o = 0.45\n");

    const auto json = gcveval("--format json --terse score " + q(test::kFixtureDir / "vkitti_table3.json"));
    const auto doc = nlohmann::json::parse(json.out);
    CHECK(std::abs(doc["a_o"].get<double>() - 0.49) <= 0.005);
}

TEST_CASE("score saves a report that re-renders identically") {
    TempDir dir;
    const auto md = gcveval("score " + q(test::kFixtureDir / "vkitti_table3.json") + " --report " + q(dir / "r.json"));
    REQUIRE(md.exit_code == 0);
    const auto saved = report_from_json(test::slurp(dir / "r.json"));
    CHECK(saved.scores.s_o.has_value());
    const auto again = gcveval("report " + q(dir / "r.json"));
    CHECK(again.exit_code == 0);
    CHECK(again.out == md.out);
}

TEST_CASE("single reference and degenerate matrices") {
    TempDir dir;
    test::write_text(dir / "one.json", R"({"metric_name": "m", "dataset_ids": ["syn", "ref"], "cells": [[0.9, 0.5], [0.4, 0.8]]})");
    const auto one = gcveval("--terse score " + q(dir / "one.json"));
    CHECK(one.exit_code == 0);
    CHECK(one.out == "A_o = 0.56\nS_o = " + std::string(kTransferUnavailable) + "\n");

    test::write_text(dir / "zero.json", R"({"metric_name": "m", "dataset_ids": ["syn", "ref"], "cells": [[0.9, 0.5], [0.4, 0]]})");
    const auto zero = gcveval("score " + q(dir / "zero.json"));
    CHECK(zero.exit_code == 2);
    CHECK(contains(zero.err, "ref"));

    test::write_text(dir / "alone.json", R"({"metric_name": "m", "dataset_ids": ["syn"], "cells": [[0.9]]})");
    CHECK(gcveval("score " + q(dir / "alone.json")).exit_code == 2);

    const auto usage = gcveval("score");
    CHECK(usage.exit_code == 2);
}

TEST_CASE("matrix import, export and normalize") {
    TempDir dir;
    const auto exported = gcveval("matrix export " + q(test::kFixtureDir / "vkitti_table3.json") + " -o " + q(dir / "m.csv"));
    REQUIRE(exported.exit_code == 0);
    const auto imported = gcveval("matrix import " + q(dir / "m.csv"));
    REQUIRE(imported.exit_code == 0);
    CHECK(matrix_from_json(imported.out) == matrix_from_json(test::slurp(test::kFixtureDir / "vkitti_table3.json")));

    const auto normalized = gcveval("matrix normalize " + q(dir / "m.csv"));
    CHECK(contains(normalized.out, "| kitti | 0.77 | 1.00 | 0.26 |"));
    const auto as_json = gcveval("--format json matrix normalize " + q(dir / "m.csv"));
    CHECK(gcv_from_json(as_json.out).at(2, 0) > 1.0);
}

TEST_CASE("prep equalizes train sizes and is reproducible") {
    TempDir dir;
    const auto config = copy_corpus(dir.path());
    const auto first = gcveval("--config " + q(config) + " --format json prep");
    REQUIRE(first.exit_code == 0);
    const auto doc = nlohmann::json::parse(first.out);
    CHECK(doc["shared_labels"] == nlohmann::json::array({"car", "person"}));
    for (const auto& d : doc["datasets"]) CHECK(d["train"] == doc["datasets"][0]["train"]);

    const auto splits = dir / "corpus" / "splits";
    std::map<std::string, std::string> before;
    for (const auto& e : fs::directory_iterator(splits)) before[e.path().filename().string()] = test::slurp(e.path());
    REQUIRE(gcveval("--config " + q(config) + " prep").exit_code == 0);
    for (const auto& [name, text] : before) CHECK(test::slurp(splits / name) == text);
}

TEST_CASE("prep rejects disjoint label spaces") {
    TempDir dir;
    const auto config = copy_corpus(dir.path());
    auto doc = nlohmann::json::parse(test::slurp(config));
    doc["datasets"][0]["label_aliases"] = {{"car", "automobile"}, {"pedestrian", "walker"}, {"cyclist", "rider"}, {"van", "lorry"}};
    test::write_text(config, doc.dump());
    const auto r = gcveval("--config " + q(config) + " prep");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "no category in common"));
}

TEST_CASE("toy run produces the full matrix and a warm rerun is free") {
    TempDir dir;
    const auto config = toy_experiment(dir.path());
    const auto first = gcveval("--config " + q(config) + " run");
    REQUIRE(first.exit_code == 0);
    CHECK(contains(first.err, "cached 0"));
    const auto m = matrix_from_json(test::slurp(dir / "matrix.json"));
    CHECK(m.side() == 3);
    CHECK(m.metric_name() == "toy_accuracy");

    const auto warm = gcveval("--config " + q(config) + " run");
    REQUIRE(warm.exit_code == 0);
    CHECK(contains(warm.err, "cached 9"));
    CHECK(contains(warm.err, "train runs 0, eval runs 0"));

    const auto scored = gcveval("--terse score " + q(dir / "matrix.json"));
    CHECK(scored.out == "A_o = 1.00\nS_o = 1.00\n");
    const auto full = gcveval("score " + q(dir / "matrix.json"));
    CHECK(contains(full.out, "cache hits: 9 of 9"));

    const auto fresh = gcveval("--config " + q(config) + " --fresh run");
    CHECK(contains(fresh.err, "cached 0"));
}

TEST_CASE("missing runner binary exits with the cell") {
    TempDir dir;
    const auto config = toy_experiment(dir.path());
    set_runner(config, "train", "/nonexistent/trainer {train_manifest} {workdir} {seed}");
    const auto r = gcveval("--config " + q(config) + " run");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.err, "train(toy_syn)"));
    CHECK(contains(r.err, "127"));
    CHECK_FALSE(fs::exists(dir / "matrix.json"));
}

TEST_CASE("keep-going lists every failed cell") {
    TempDir dir;
    const auto config = toy_experiment(dir.path());
    set_runner(config, "eval", "case {test_manifest} in *toy_ref_b*) exit 5;; esac; " + runner_template(config, "eval"));
    const auto r = gcveval("--config " + q(config) + " --keep-going run");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.err, "3 of 9 cells failed"));
    for (const auto* train : {"toy_syn", "toy_ref_a", "toy_ref_b"}) {
        CHECK(contains(r.err, "cell(train=" + std::string(train) + ", test=toy_ref_b)"));
    }
    CHECK_FALSE(fs::exists(dir / "matrix.json"));
}

TEST_CASE("a killed run resumes to the same matrix") {
    TempDir reference_dir;
    const auto reference_config = toy_experiment(reference_dir.path());
    REQUIRE(gcveval("--config " + q(reference_config) + " run").exit_code == 0);

    TempDir dir;
    const auto config = toy_experiment(dir.path());
    set_runner(config, "eval", "sleep 0.3; " + runner_template(config, "eval"));
    const std::string cmd = shell_quote(test::kGcveval.string()) + " --config " + q(config) + " run >/dev/null 2>&1";

    const pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        ::setpgid(0, 0);
        ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    const auto deadline = std::chrono::steady_clock::now() + 60s;
    while (cell_files(dir / "cache") < 4 && std::chrono::steady_clock::now() < deadline) std::this_thread::sleep_for(20ms);
    ::kill(-pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFSIGNALED(status));
    const auto done = cell_files(dir / "cache");
    REQUIRE(done >= 4);
    REQUIRE(done < 9);
    CHECK_FALSE(fs::exists(dir / "matrix.json"));

    const auto resumed = gcveval("--config " + q(config) + " run");
    REQUIRE(resumed.exit_code == 0);
    CHECK(contains(resumed.err, "cached " + std::to_string(done)));
    CHECK(test::slurp(dir / "matrix.json") == test::slurp(reference_dir / "matrix.json"));
}

TEST_CASE("shifted synthetic domain scores lower") {
    TempDir same_dir;
    TempDir shifted_dir;
    REQUIRE(gcveval("--config " + q(toy_experiment(same_dir.path())) + " run").exit_code == 0);
    REQUIRE(gcveval("--config " + q(toy_experiment(shifted_dir.path(), "large_shift.json")) + " run").exit_code == 0);
    const auto same = build_report(matrix_from_json(test::slurp(same_dir / "matrix.json")));
    const auto shifted = build_report(matrix_from_json(test::slurp(shifted_dir / "matrix.json")));
    CHECK(shifted.scores.a_o < same.scores.a_o);
    CHECK(*shifted.scores.s_o < *same.scores.s_o);
}
