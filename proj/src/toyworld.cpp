// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/toyworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/prep.hpp"
#include "gcv/prng.hpp"
#include "gcv/subprocess.hpp"
#include "gcv/util.hpp"

namespace gcv::toy {

namespace fs = std::filesystem;
using nlohmann::json;

void ToyDomainSpec::validate() const {
    if (classes.size() < 2) throw ValidationError("a toy domain needs at least two classes");
    std::set<std::string> names;
    double prior_sum = 0.0;
    for (const auto& c : classes) {
        if (c.name.empty() || canonical_label(c.name, {}) != c.name) {
            throw ValidationError("toy class names must be non-empty, lowercase and trimmed");
        }
        if (!names.insert(c.name).second) throw ValidationError("duplicate toy class '" + c.name + "'");
        if (!(c.spread > 0.0) || !std::isfinite(c.spread)) throw ValidationError("toy class spread must be positive");
        if (!(c.prior >= 0.0)) throw ValidationError("toy class priors must be non-negative");
        if (!std::isfinite(c.mean[0]) || !std::isfinite(c.mean[1])) throw ValidationError("toy means must be finite");
        prior_sum += c.prior;
    }
    if (std::abs(prior_sum - 1.0) > 1e-9) throw ValidationError("toy class priors must sum to 1");
    if (!(spread_scale > 0.0) || !std::isfinite(spread_scale)) throw ValidationError("spread_scale must be positive");
    if (!std::isfinite(mean_offset[0]) || !std::isfinite(mean_offset[1])) {
        throw ValidationError("mean_offset must be finite");
    }
    std::vector<double> priors;
    for (const auto& c : classes) priors.push_back(c.prior);
    for (std::size_t k : allocate_counts(priors, sample_count)) {
        if (k < 2) throw ValidationError("every toy class needs at least 2 samples; raise sample_count");
    }
}

std::string spec_to_json(const ToyDomainSpec& spec) {
    json classes = json::array();
    for (const auto& c : spec.classes) {
        classes.push_back({{"name", c.name}, {"mean", c.mean}, {"spread", c.spread}, {"prior", c.prior}});
    }
    const json doc = {{"classes", classes},
                      {"sample_count", spec.sample_count},
                      {"seed", spec.seed},
                      {"mean_offset", spec.mean_offset},
                      {"spread_scale", spec.spread_scale}};
    return doc.dump(2) + "\n";
}

ToyDomainSpec spec_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        ToyDomainSpec spec;
        for (const auto& c : doc.at("classes")) {
            spec.classes.push_back({c.at("name").get<std::string>(), c.at("mean").get<Vec2>(),
                                    c.value("spread", 1.0), c.at("prior").get<double>()});
        }
        spec.sample_count = doc.at("sample_count").get<std::size_t>();
        spec.seed = doc.value("seed", std::uint64_t{0});
        spec.mean_offset = doc.value("mean_offset", Vec2{0.0, 0.0});
        spec.spread_scale = doc.value("spread_scale", 1.0);
        return spec;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid toy domain spec: ") + e.what());
    }
}

std::vector<std::size_t> allocate_counts(std::span<const double> priors, std::size_t total) {
    std::vector<std::size_t> counts(priors.size(), 0);
    std::vector<double> remainders(priors.size(), 0.0);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < priors.size(); ++k) {
        const double share = priors[k] * static_cast<double>(total);
        counts[k] = static_cast<std::size_t>(std::floor(share + 1e-9));
        remainders[k] = share - static_cast<double>(counts[k]);
        assigned += counts[k];
    }
    std::vector<std::size_t> order(priors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < total && !order.empty(); ++i, ++assigned) ++counts[order[i % order.size()]];
    return counts;
}

std::vector<ToySample> sample_domain(const ToyDomainSpec& spec) {
    spec.validate();
    std::vector<double> priors;
    for (const auto& c : spec.classes) priors.push_back(c.prior);
    const auto counts = allocate_counts(priors, spec.sample_count);

    SplitMix64 rng(spec.seed);
    std::vector<ToySample> out;
    out.reserve(spec.sample_count);
    for (std::size_t k = 0; k < spec.classes.size(); ++k) {
        const auto& c = spec.classes[k];
        const double sigma = c.spread * spec.spread_scale;
        for (std::size_t n = 0; n < counts[k]; ++n) {
            char id[16];
            std::snprintf(id, sizeof id, "s%06zu", out.size());
            const double dx = rng.normal();
            const double dy = rng.normal();
            out.push_back({id, c.name,
                           {c.mean[0] + spec.mean_offset[0] + sigma * dx, c.mean[1] + spec.mean_offset[1] + sigma * dy}});
        }
    }
    return out;
}

std::vector<AnnotationRecord> to_records(std::span<const ToySample> samples) {
    std::vector<AnnotationRecord> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back({s.id, s.label, {s.feature[0], s.feature[1], s.feature[0] + 1.0, s.feature[1] + 1.0},
                       AnnotationFormat::interchange});
    }
    return out;
}

std::vector<ToySample> from_records(std::span<const AnnotationRecord> records) {
    std::vector<ToySample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.image_id, r.category, {r.bbox.x_min, r.bbox.y_min}});
    return out;
}

void generate_toy_dataset(const ToyDomainSpec& spec, const fs::path& dir) {
    const auto samples = sample_domain(spec);
    write_file_atomic(dir / "annotations.json", serialize_records(to_records(samples)));
    write_file_atomic(dir / "domain.json", spec_to_json(spec));
}

ToyModel fit_centroids(std::span<const ToySample> samples) {
    std::map<std::string, std::pair<Vec2, std::size_t>> sums;
    for (const auto& s : samples) {
        auto& [sum, n] = sums[s.label];
        sum[0] += s.feature[0];
        sum[1] += s.feature[1];
        ++n;
    }
    ToyModel model;
    for (const auto& [label, acc] : sums) {
        const auto n = static_cast<double>(acc.second);
        model.centroids[label] = {acc.first[0] / n, acc.first[1] / n};
    }
    return model;
}

const std::string& predict(const ToyModel& model, const Vec2& feature) {
    if (model.centroids.empty()) throw ValidationError("toy model has no centroids");
    const std::string* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [label, c] : model.centroids) {
        const double dx = feature[0] - c[0];
        const double dy = feature[1] - c[1];
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = &label;
        }
    }
    return *best;
}

double accuracy(const ToyModel& model, std::span<const ToySample> samples) {
    if (samples.empty()) throw ValidationError("cannot score an empty test set");
    std::size_t correct = 0;
    for (const auto& s : samples) correct += predict(model, s.feature) == s.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::string model_to_json(const ToyModel& model) {
    json centroids = json::object();
    for (const auto& [label, c] : model.centroids) centroids[label] = c;
    return json{{"model", "nearest_centroid"}, {"centroids", centroids}}.dump(2) + "\n";
}

ToyModel model_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        ToyModel model;
        for (const auto& [label, c] : doc.at("centroids").items()) model.centroids[label] = c.get<Vec2>();
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid toy model: ") + e.what());
    }
}

std::vector<ToySample> load_split_samples(const fs::path& split_manifest, SplitPart part) {
    const auto manifest = split_manifest_from_json(read_text_file(split_manifest));
    const auto records = parse_annotations(AnnotationFormat::interchange, manifest.annotations).records;
    std::map<std::string, const AnnotationRecord*> first_record;
    for (const auto& r : records) first_record.try_emplace(r.image_id, &r);

    const auto& ids = part == SplitPart::train ? manifest.split.train_ids : manifest.split.test_ids;
    std::vector<ToySample> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = first_record.find(id);
        if (it == first_record.end()) {
            throw ValidationError("split image '" + id + "' has no record in " + manifest.annotations.string());
        }
        const auto& r = *it->second;
        out.push_back({r.image_id, r.category, {r.bbox.x_min, r.bbox.y_min}});
    }
    return out;
}

namespace {

json spec_json(const ToyDomainSpec& spec) { return json::parse(spec_to_json(spec)); }

}  // namespace

std::string world_to_json(const ToyWorld& world) {
    json domains = json::array();
    for (const auto& d : world.domains) {
        json entry = spec_json(d.spec);
        entry["id"] = d.dataset_id;
        entry["role"] = std::string(to_string(d.role));
        domains.push_back(std::move(entry));
    }
    const json doc = {{"domains", domains},
                      {"test_fraction", world.test_fraction},
                      {"split_seed", world.split_seed},
                      {"max_parallel_cells", world.max_parallel_cells},
                      {"timeout_seconds", world.timeout_seconds}};
    return doc.dump(2) + "\n";
}

ToyWorld world_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        ToyWorld world;
        for (const auto& d : doc.at("domains")) {
            world.domains.push_back({d.at("id").get<std::string>(), parse_dataset_role(d.at("role").get<std::string>()),
                                     spec_from_json(d.dump())});
        }
        world.test_fraction = doc.value("test_fraction", world.test_fraction);
        world.split_seed = doc.value("split_seed", world.split_seed);
        world.max_parallel_cells = doc.value("max_parallel_cells", world.max_parallel_cells);
        world.timeout_seconds = doc.value("timeout_seconds", world.timeout_seconds);
        return world;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid toy world: ") + e.what());
    }
}

fs::path write_toy_experiment(const ToyWorld& world, const fs::path& out_dir, const fs::path& runner) {
    json datasets = json::array();
    for (const auto& d : world.domains) {
        if (!valid_dataset_id(d.dataset_id)) throw ValidationError("invalid toy dataset id '" + d.dataset_id + "'");
        generate_toy_dataset(d.spec, out_dir / d.dataset_id);
        datasets.push_back({{"id", d.dataset_id},
                            {"role", std::string(to_string(d.role))},
                            {"format", "interchange"},
                            {"annotations", d.dataset_id + "/annotations.json"}});
    }
    const std::string exe = shell_quote(fs::absolute(runner).string());
    const json config = {
        {"datasets", datasets},
        {"splits", {{"dir", "splits"}, {"train_size", "auto"}, {"test_fraction", world.test_fraction},
                    {"seed", world.split_seed}}},
        {"runner",
         {{"train", exe + " train --manifest {train_manifest} --workdir {workdir} --seed {seed}"},
          {"eval", exe + " eval --model {model_artifact} --manifest {test_manifest} --workdir {workdir}"},
          {"timeout_seconds", world.timeout_seconds},
          {"metric_name", kMetricName}}},
        {"execution", {{"cache_dir", "cache"}, {"max_parallel_cells", world.max_parallel_cells}}},
        {"output", {{"matrix", "matrix.json"}}},
    };
    const fs::path path = out_dir / "experiment.json";
    write_file_atomic(path, config.dump(2) + "\n");
    return path;
}

}  // namespace gcv::toy
