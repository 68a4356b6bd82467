// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gcv/annotations.hpp"

namespace gcv {

enum class DatasetRole { synthetic_under_test, reference };

std::string_view to_string(DatasetRole role);
DatasetRole parse_dataset_role(std::string_view name);

struct DatasetManifest {
    std::string dataset_id;
    DatasetRole role = DatasetRole::reference;
    AnnotationFormat format = AnnotationFormat::kitti_txt;
    std::filesystem::path image_dir;  // empty: skip the on-disk image check
    std::filesystem::path annotation_source;
    LabelAliases label_aliases;
    std::filesystem::path class_map;    // YOLO only
    std::filesystem::path image_sizes;  // YOLO only
};

/// Dataset ids double as file and directory names: [A-Za-z0-9._-]+, not "." or "..".
bool valid_dataset_id(std::string_view id);

/// Checks id validity, id uniqueness and exactly one synthetic_under_test, then
/// returns the manifests with the synthetic dataset first and references in
/// declaration order. Throws ValidationError.
std::vector<DatasetManifest> order_datasets(std::vector<DatasetManifest> manifests);

struct DatasetPrepStats {
    std::size_t records_parsed = 0;
    std::size_t degenerate_boxes_dropped = 0;
    std::size_t missing_images_dropped = 0;
    std::size_t images_without_shared_labels = 0;

    bool operator==(const DatasetPrepStats&) const = default;
};

/// One dataset's prep output: the split plus what a runner needs to find the data.
/// Serialized to <splits_dir>/<dataset_id>.split.json.
struct SplitManifest {
    HarmonizedSplit split;
    DatasetRole role = DatasetRole::reference;
    std::filesystem::path annotations;  // filtered interchange document
    std::filesystem::path image_dir;
    DatasetPrepStats stats;

    bool operator==(const SplitManifest&) const = default;
};

std::string split_manifest_to_json(const SplitManifest& manifest);
SplitManifest split_manifest_from_json(std::string_view document);

std::filesystem::path split_manifest_path(const std::filesystem::path& splits_dir, std::string_view dataset_id);
std::filesystem::path filtered_annotations_path(const std::filesystem::path& splits_dir, std::string_view dataset_id);

struct PrepOptions {
    SplitOptions split;
    std::filesystem::path out_dir;
};

struct PrepResult {
    LabelSpace shared_labels;
    std::vector<SplitManifest> manifests;  // synthetic first
    std::vector<std::string> warnings;
};

/// Full preparation pipeline: parse every dataset, drop images missing from
/// image_dir, intersect label spaces, filter to shared labels, split, and write
/// the filtered annotations plus one split manifest per dataset.
PrepResult prepare_datasets(const std::vector<DatasetManifest>& manifests, const PrepOptions& options);

}  // namespace gcv
