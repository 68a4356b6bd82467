// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/prep.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "gcv/errors.hpp"
#include "gcv/util.hpp"

namespace gcv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(DatasetRole role) {
    return role == DatasetRole::synthetic_under_test ? "synthetic_under_test" : "reference";
}

DatasetRole parse_dataset_role(std::string_view name) {
    if (name == "synthetic_under_test") return DatasetRole::synthetic_under_test;
    if (name == "reference") return DatasetRole::reference;
    throw ValidationError("unknown dataset role '" + std::string(name) +
                          "' (expected synthetic_under_test or reference)");
}

bool valid_dataset_id(std::string_view id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    });
}

std::vector<DatasetManifest> order_datasets(std::vector<DatasetManifest> manifests) {
    std::set<std::string> seen;
    std::size_t synthetic = 0;
    for (const auto& m : manifests) {
        if (!valid_dataset_id(m.dataset_id)) {
            throw ValidationError("dataset id '" + m.dataset_id + "' must match [A-Za-z0-9._-]+");
        }
        if (!seen.insert(m.dataset_id).second) throw ValidationError("duplicate dataset id '" + m.dataset_id + "'");
        if (m.role == DatasetRole::synthetic_under_test) ++synthetic;
    }
    if (synthetic != 1) {
        throw ValidationError("exactly one dataset must have role synthetic_under_test, found " +
                              std::to_string(synthetic));
    }
    if (manifests.size() < 2) throw ValidationError("at least one reference dataset is required");
    std::stable_partition(manifests.begin(), manifests.end(),
                          [](const DatasetManifest& m) { return m.role == DatasetRole::synthetic_under_test; });
    return manifests;
}

std::string split_manifest_to_json(const SplitManifest& m) {
    const auto& s = m.split;
    json doc = {
        {"dataset_id", s.dataset_id},
        {"role", to_string(m.role)},
        {"seed", s.seed},
        {"test_fraction", s.test_fraction},
        {"shared_labels", s.shared_labels.labels()},
        {"counts",
         {{"available_images", s.available_images},
          {"training_pool", s.training_pool},
          {"train", s.train_ids.size()},
          {"test", s.test_ids.size()},
          {"records_parsed", m.stats.records_parsed},
          {"degenerate_boxes_dropped", m.stats.degenerate_boxes_dropped},
          {"missing_images_dropped", m.stats.missing_images_dropped},
          {"images_without_shared_labels", m.stats.images_without_shared_labels}}},
        {"annotations", m.annotations.generic_string()},
        {"image_dir", m.image_dir.generic_string()},
        {"train_ids", s.train_ids},
        {"test_ids", s.test_ids},
    };
    return doc.dump(2) + "\n";
}

SplitManifest split_manifest_from_json(std::string_view document) {
    try {
        const json doc = json::parse(document);
        SplitManifest m;
        m.split.dataset_id = doc.at("dataset_id").get<std::string>();
        m.role = parse_dataset_role(doc.at("role").get<std::string>());
        m.split.seed = doc.at("seed").get<std::uint64_t>();
        m.split.test_fraction = doc.at("test_fraction").get<double>();
        m.split.shared_labels = LabelSpace(doc.at("shared_labels").get<std::vector<std::string>>());
        m.split.train_ids = doc.at("train_ids").get<std::vector<std::string>>();
        m.split.test_ids = doc.at("test_ids").get<std::vector<std::string>>();
        const auto& counts = doc.at("counts");
        m.split.available_images = counts.at("available_images").get<std::size_t>();
        m.split.training_pool = counts.at("training_pool").get<std::size_t>();
        m.stats.records_parsed = counts.value("records_parsed", std::size_t{0});
        m.stats.degenerate_boxes_dropped = counts.value("degenerate_boxes_dropped", std::size_t{0});
        m.stats.missing_images_dropped = counts.value("missing_images_dropped", std::size_t{0});
        m.stats.images_without_shared_labels = counts.value("images_without_shared_labels", std::size_t{0});
        m.annotations = doc.at("annotations").get<std::string>();
        m.image_dir = doc.value("image_dir", std::string{});
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid split manifest: ") + e.what());
    }
}

fs::path split_manifest_path(const fs::path& splits_dir, std::string_view dataset_id) {
    return splits_dir / (std::string(dataset_id) + ".split.json");
}

fs::path filtered_annotations_path(const fs::path& splits_dir, std::string_view dataset_id) {
    return splits_dir / (std::string(dataset_id) + ".annotations.json");
}

namespace {

// Relative paths of every file under `dir`, extension removed, '/'-separated.
std::unordered_set<std::string> image_stems(const fs::path& dir) {
    std::unordered_set<std::string> stems;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), dir);
        stems.insert((rel.parent_path() / rel.stem()).generic_string());
    }
    return stems;
}

struct ParsedDataset {
    std::vector<AnnotationRecord> records;
    DatasetPrepStats stats;
};

}  // namespace

PrepResult prepare_datasets(const std::vector<DatasetManifest>& input, const PrepOptions& options) {
    const auto manifests = order_datasets(input);
    PrepResult result;

    std::vector<ParsedDataset> parsed;
    std::vector<LabelSpace> spaces;
    for (const auto& m : manifests) {
        ParseOptions popts{m.label_aliases, m.class_map, m.image_sizes};
        auto pr = parse_annotations(m.format, m.annotation_source, popts);
        ParsedDataset d;
        d.stats.records_parsed = pr.records.size() + pr.degenerate_dropped;
        d.stats.degenerate_boxes_dropped = pr.degenerate_dropped;
        if (pr.degenerate_dropped > 0) {
            result.warnings.push_back(m.dataset_id + ": dropped " + std::to_string(pr.degenerate_dropped) +
                                      " zero-area boxes");
        }

        if (!m.image_dir.empty()) {
            if (!fs::is_directory(m.image_dir)) {
                throw ValidationError("image directory for '" + m.dataset_id + "' not found: " + m.image_dir.string());
            }
            const auto on_disk = image_stems(m.image_dir);
            std::set<std::string> missing;
            for (const auto& r : pr.records) {
                if (!on_disk.contains(r.image_id)) missing.insert(r.image_id);
            }
            if (!missing.empty()) {
                std::erase_if(pr.records, [&](const AnnotationRecord& r) { return missing.contains(r.image_id); });
                d.stats.missing_images_dropped = missing.size();
                const std::string msg = m.dataset_id + ": dropped " + std::to_string(missing.size()) +
                                        " annotated images missing from " + m.image_dir.string() + " (first: " +
                                        *missing.begin() + ")";
                spdlog::warn("{}", msg);
                result.warnings.push_back(msg);
            }
        }
        spaces.push_back(LabelSpace::from_records(pr.records));
        d.records = std::move(pr.records);
        parsed.push_back(std::move(d));
    }

    result.shared_labels = intersect_label_spaces(spaces);

    std::map<std::string, std::vector<ImageGroup>> filtered;
    for (std::size_t i = 0; i < manifests.size(); ++i) {
        auto groups = filter_to_shared(parsed[i].records, result.shared_labels);
        std::set<std::string> all_images;
        for (const auto& r : parsed[i].records) all_images.insert(r.image_id);
        parsed[i].stats.images_without_shared_labels = all_images.size() - groups.size();
        filtered.emplace(manifests[i].dataset_id, std::move(groups));
    }

    auto splits = make_splits(filtered, result.shared_labels, options.split);

    fs::create_directories(options.out_dir);
    const fs::path out_dir = fs::absolute(options.out_dir).lexically_normal();
    for (std::size_t i = 0; i < manifests.size(); ++i) {
        const auto& m = manifests[i];
        std::vector<AnnotationRecord> kept;
        for (const auto& g : filtered.at(m.dataset_id)) kept.insert(kept.end(), g.records.begin(), g.records.end());

        SplitManifest sm;
        sm.split = std::move(splits.at(m.dataset_id));
        sm.role = m.role;
        sm.annotations = filtered_annotations_path(out_dir, m.dataset_id);
        sm.image_dir = m.image_dir.empty() ? fs::path{} : fs::absolute(m.image_dir).lexically_normal();
        sm.stats = parsed[i].stats;

        write_file_atomic(sm.annotations, serialize_records(kept));
        write_file_atomic(split_manifest_path(out_dir, m.dataset_id), split_manifest_to_json(sm));
        spdlog::info("{}: {} images retained, train={} test={}", m.dataset_id, sm.split.available_images,
                     sm.split.train_ids.size(), sm.split.test_ids.size());
        result.manifests.push_back(std::move(sm));
    }
    return result;
}

}  // namespace gcv
