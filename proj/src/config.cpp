// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/util.hpp"

namespace gcv {

namespace fs = std::filesystem;
using nlohmann::json;

void RunnerSpec::validate() const {
    for (const char* p : {"{train_manifest}", "{workdir}", "{seed}"}) {
        if (train_command_template.find(p) == std::string::npos) {
            throw ConfigError("runner.train", std::string("template must contain ") + p);
        }
    }
    for (const char* p : {"{model_artifact}", "{test_manifest}", "{workdir}"}) {
        if (eval_command_template.find(p) == std::string::npos) {
            throw ConfigError("runner.eval", std::string("template must contain ") + p);
        }
    }
    if (timeout_seconds <= 0) throw ConfigError("runner.timeout_seconds", "must be a positive integer");
    if (metric_name.empty()) throw ConfigError("runner.metric_name", "must be a non-empty string");
}

namespace {

const json& field(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(path + "." + key, "required field is missing");
    return obj[key];
}

std::string string_field(const json& obj, const std::string& path, const char* key) {
    const auto& v = field(obj, path, key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::string optional_string(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_string()) throw ConfigError(path + "." + key, "must be a string");
    return obj[key].get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    if (!doc[key].is_object()) throw ConfigError(key, "must be an object");
    return doc[key];
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view document, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "must be a JSON object");

    ExperimentConfig cfg;
    const auto& datasets = field(doc, "", "datasets");
    if (!datasets.is_array() || datasets.empty()) throw ConfigError("datasets", "must be a non-empty array");
    std::vector<DatasetManifest> manifests;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const std::string path = "datasets[" + std::to_string(i) + "]";
        const auto& d = datasets[i];
        if (!d.is_object()) throw ConfigError(path, "must be an object");
        DatasetManifest m;
        m.dataset_id = string_field(d, path, "id");
        if (!valid_dataset_id(m.dataset_id)) throw ConfigError(path + ".id", "must match [A-Za-z0-9._-]+");
        try {
            m.role = parse_dataset_role(string_field(d, path, "role"));
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ConfigError(path + ".role", e.what());
        }
        try {
            m.format = parse_annotation_format(string_field(d, path, "format"));
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ConfigError(path + ".format", e.what());
        }
        m.annotation_source = resolve(base_dir, string_field(d, path, "annotations"));
        m.image_dir = resolve(base_dir, optional_string(d, path, "images"));
        m.class_map = resolve(base_dir, optional_string(d, path, "class_map"));
        m.image_sizes = resolve(base_dir, optional_string(d, path, "image_sizes"));
        if (d.contains("label_aliases")) {
            const auto& aliases = d["label_aliases"];
            if (!aliases.is_object()) throw ConfigError(path + ".label_aliases", "must be an object of strings");
            for (const auto& [from, to] : aliases.items()) {
                if (!to.is_string()) throw ConfigError(path + ".label_aliases." + from, "must be a string");
                m.label_aliases[from] = to.get<std::string>();
            }
        }
        manifests.push_back(std::move(m));
    }
    try {
        cfg.datasets = order_datasets(std::move(manifests));
    } catch (const ValidationError& e) {
        throw ConfigError("datasets", e.what());
    }

    const auto& splits = section(doc, "splits");
    cfg.splits_dir = resolve(base_dir, splits.contains("dir") ? string_field(splits, "splits", "dir") : "splits");
    if (splits.contains("train_size")) {
        const auto& ts = splits["train_size"];
        if (ts.is_string() && ts.get<std::string>() == "auto") {
            cfg.split.train_size.reset();
        } else if (ts.is_number_unsigned() && ts.get<std::size_t>() > 0) {
            cfg.split.train_size = ts.get<std::size_t>();
        } else {
            throw ConfigError("splits.train_size", "must be \"auto\" or a positive integer");
        }
    }
    if (splits.contains("test_fraction")) {
        const auto& tf = splits["test_fraction"];
        if (!tf.is_number() || !(tf.get<double>() > 0.0)) {
            throw ConfigError("splits.test_fraction", "must be a positive number");
        }
        cfg.split.test_fraction = tf.get<double>();
    }
    if (splits.contains("seed")) {
        if (!splits["seed"].is_number_unsigned()) throw ConfigError("splits.seed", "must be a non-negative integer");
        cfg.split.seed = splits["seed"].get<std::uint64_t>();
    }

    if (doc.contains("runner")) {
        const auto& r = section(doc, "runner");
        RunnerSpec spec;
        spec.train_command_template = string_field(r, "runner", "train");
        spec.eval_command_template = string_field(r, "runner", "eval");
        spec.metric_name = string_field(r, "runner", "metric_name");
        if (r.contains("timeout_seconds")) {
            if (!r["timeout_seconds"].is_number_integer()) {
                throw ConfigError("runner.timeout_seconds", "must be a positive integer");
            }
            spec.timeout_seconds = r["timeout_seconds"].get<int>();
        }
        spec.validate();
        cfg.runner = std::move(spec);
    }

    const auto& exec = section(doc, "execution");
    cfg.execution.cache_dir =
        resolve(base_dir, exec.contains("cache_dir") ? string_field(exec, "execution", "cache_dir") : "cache");
    if (exec.contains("max_parallel_cells")) {
        const auto& mp = exec["max_parallel_cells"];
        if (!mp.is_number_unsigned() || mp.get<std::size_t>() == 0) {
            throw ConfigError("execution.max_parallel_cells", "must be a positive integer");
        }
        cfg.execution.max_parallel_cells = mp.get<std::size_t>();
    }
    for (auto [key, target] : {std::pair{"parallel_training", &cfg.execution.parallel_training},
                               std::pair{"keep_going", &cfg.execution.keep_going}}) {
        if (!exec.contains(key)) continue;
        if (!exec[key].is_boolean()) throw ConfigError(std::string("execution.") + key, "must be a boolean");
        *target = exec[key].get<bool>();
    }

    const auto& output = section(doc, "output");
    cfg.matrix_output =
        resolve(base_dir, output.contains("matrix") ? string_field(output, "output", "matrix") : "matrix.json");
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("<file>", "config file not found: " + path.string());
    const fs::path abs = fs::absolute(path).lexically_normal();
    auto cfg = parse_experiment_config(read_text_file(abs), abs.parent_path());
    cfg.config_path = abs;
    if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') {
        cfg.execution.cache_dir = fs::absolute(env).lexically_normal();
    }
    return cfg;
}

}  // namespace gcv
