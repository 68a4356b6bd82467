// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcv/annotations.hpp"
#include "gcv/prep.hpp"

// Seconds-scale stand-in for real datasets and detectors: labelled 2-D points
// drawn from isotropic Gaussians, and a nearest-centroid classifier that speaks
// the runner protocol. The metric is plain accuracy ("toy_accuracy").

namespace gcv::toy {

inline constexpr const char* kMetricName = "toy_accuracy";

using Vec2 = std::array<double, 2>;

struct ToyClass {
    std::string name;
    Vec2 mean{0.0, 0.0};
    double spread = 1.0;  // isotropic standard deviation
    double prior = 0.5;

    bool operator==(const ToyClass&) const = default;
};

struct ToyDomainSpec {
    std::vector<ToyClass> classes;
    std::size_t sample_count = 1000;
    std::uint64_t seed = 0;
    Vec2 mean_offset{0.0, 0.0};  // added to every class mean
    double spread_scale = 1.0;   // multiplies every class spread

    /// Throws ValidationError: priors must sum to 1, spreads and scale must be
    /// positive, and every class must receive at least 2 samples.
    void validate() const;
    bool operator==(const ToyDomainSpec&) const = default;
};

std::string spec_to_json(const ToyDomainSpec& spec);
ToyDomainSpec spec_from_json(std::string_view document);

/// Largest-remainder allocation of `total` over `priors`: floor shares first,
/// leftovers go to the largest fractional parts, ties to the lower index.
std::vector<std::size_t> allocate_counts(std::span<const double> priors, std::size_t total);

struct ToySample {
    std::string id;
    std::string label;
    Vec2 feature{0.0, 0.0};

    bool operator==(const ToySample&) const = default;
};

/// Deterministic for a given spec. Ids are "s000000", "s000001", ... in class order.
std::vector<ToySample> sample_domain(const ToyDomainSpec& spec);

/// Each sample becomes one record whose box origin is the feature point: (x, y, x + 1, y + 1).
std::vector<AnnotationRecord> to_records(std::span<const ToySample> samples);
std::vector<ToySample> from_records(std::span<const AnnotationRecord> records);

/// Writes <dir>/annotations.json (interchange format) and <dir>/domain.json.
void generate_toy_dataset(const ToyDomainSpec& spec, const std::filesystem::path& dir);

struct ToyModel {
    std::map<std::string, Vec2> centroids;

    bool operator==(const ToyModel&) const = default;
};

ToyModel fit_centroids(std::span<const ToySample> samples);
/// Nearest centroid by Euclidean distance; ties go to the lexicographically smaller label.
const std::string& predict(const ToyModel& model, const Vec2& feature);
double accuracy(const ToyModel& model, std::span<const ToySample> samples);

std::string model_to_json(const ToyModel& model);
ToyModel model_from_json(std::string_view document);

enum class SplitPart { train, test };

/// Samples listed in a split manifest, read from its filtered annotation document.
std::vector<ToySample> load_split_samples(const std::filesystem::path& split_manifest, SplitPart part);

struct ToyDomain {
    std::string dataset_id;
    DatasetRole role = DatasetRole::reference;
    ToyDomainSpec spec;

    bool operator==(const ToyDomain&) const = default;
};

/// A set of toy domains plus the experiment settings that tie them together.
struct ToyWorld {
    std::vector<ToyDomain> domains;
    double test_fraction = 0.5;
    std::uint64_t split_seed = 0;
    std::size_t max_parallel_cells = 1;
    int timeout_seconds = 120;

    bool operator==(const ToyWorld&) const = default;
};

std::string world_to_json(const ToyWorld& world);
ToyWorld world_from_json(std::string_view document);

/// Writes <out_dir>/<id>/annotations.json per domain and <out_dir>/experiment.json
/// wired to `runner`. Returns the experiment config path.
std::filesystem::path write_toy_experiment(const ToyWorld& world, const std::filesystem::path& out_dir,
                                           const std::filesystem::path& runner);

}  // namespace gcv::toy
