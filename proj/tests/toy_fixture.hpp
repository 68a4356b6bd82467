// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gcv/config.hpp"
#include "gcv/prep.hpp"
#include "gcv/toyworld.hpp"
#include "support.hpp"

namespace gcv::test {

inline const fs::path kToyRunner = kToolDir / "gcv_toy_runner";
inline const fs::path kGcveval = kToolDir / "gcveval";

/// Two well-separated classes; `offset` shifts every mean.
inline toy::ToyDomainSpec two_class_spec(std::size_t samples, std::uint64_t seed, toy::Vec2 offset = {0.0, 0.0}) {
    toy::ToyDomainSpec spec;
    spec.classes = {{"circle", {-2.0, 0.0}, 1.0, 0.5}, {"square", {2.0, 0.0}, 1.0, 0.5}};
    spec.sample_count = samples;
    spec.seed = seed;
    spec.mean_offset = offset;
    return spec;
}

inline toy::ToyWorld toy_world(std::size_t references, std::size_t samples = 200, toy::Vec2 synthetic_offset = {0, 0}) {
    toy::ToyWorld world;
    world.domains.push_back({"syn", DatasetRole::synthetic_under_test, two_class_spec(samples, 100, synthetic_offset)});
    for (std::size_t i = 1; i <= references; ++i) {
        world.domains.push_back({"ref" + std::to_string(i), DatasetRole::reference, two_class_spec(samples, 100 + i)});
    }
    return world;
}

/// Generates the world under `dir`, prepares splits and returns the loaded config.
inline ExperimentConfig prepared_toy(const toy::ToyWorld& world, const fs::path& dir) {
    const auto config_path = toy::write_toy_experiment(world, dir, kToyRunner);
    auto cfg = load_experiment_config(config_path);
    prepare_datasets(cfg.datasets, PrepOptions{cfg.split, cfg.splits_dir});
    return cfg;
}

}  // namespace gcv::test
