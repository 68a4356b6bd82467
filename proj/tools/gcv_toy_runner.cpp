// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

// Nearest-centroid runner for toy datasets.
//
//   gcv_toy_runner train --manifest <split.json> --workdir <dir> [--seed <n>]
//   gcv_toy_runner eval  --model <dir> --manifest <split.json> --workdir <dir>
//
// `eval` prints diagnostics first and the result object as its final line.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/toyworld.hpp"
#include "gcv/util.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"nearest-centroid runner for toy datasets"};
    app.require_subcommand(1);

    fs::path manifest;
    fs::path workdir;
    fs::path model_dir;
    std::uint64_t seed = 0;

    auto* train = app.add_subcommand("train", "fit centroids on the train split; writes <workdir>/model.json");
    train->add_option("--manifest", manifest, "split manifest")->required();
    train->add_option("--workdir", workdir, "artifact directory")->required();
    train->add_option("--seed", seed, "accepted for protocol compatibility; fitting is deterministic");

    auto* eval = app.add_subcommand("eval", "score a trained model on the test split");
    eval->add_option("--model", model_dir, "artifact directory written by train")->required();
    eval->add_option("--manifest", manifest, "split manifest")->required();
    eval->add_option("--workdir", workdir, "scratch directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const auto samples = gcv::toy::load_split_samples(manifest, gcv::toy::SplitPart::train);
            const auto model = gcv::toy::fit_centroids(samples);
            fs::create_directories(workdir);
            gcv::write_file_atomic(workdir / "model.json", gcv::toy::model_to_json(model));
            std::cout << "trained on " << samples.size() << " samples, " << model.centroids.size() << " classes\n";
            return 0;
        }
        const auto model = gcv::toy::model_from_json(gcv::read_text_file(model_dir / "model.json"));
        const auto samples = gcv::toy::load_split_samples(manifest, gcv::toy::SplitPart::test);
        const double acc = gcv::toy::accuracy(model, samples);
        std::cout << "evaluated " << samples.size() << " samples\n";
        std::cout << nlohmann::json{{"metric_name", gcv::toy::kMetricName}, {"value", acc}}.dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "gcv_toy_runner: " << e.what() << "\n";
        return 2;
    }
}
