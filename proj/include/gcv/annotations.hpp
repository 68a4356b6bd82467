// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gcv {

enum class AnnotationFormat {
    kitti_txt,    // one label file per image, type in field 1, bbox in fields 5-8
    coco_json,    // single JSON document
    yolo_txt,     // one label file per image plus class map and image-size index
    interchange,  // the tool's own record document (filtered prep output, toy datasets)
};

std::string_view to_string(AnnotationFormat format);
AnnotationFormat parse_annotation_format(std::string_view name);

/// Axis-aligned box in absolute pixel coordinates.
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool degenerate() const noexcept { return !(x_min < x_max && y_min < y_max); }
    bool operator==(const BBox&) const = default;
};

struct AnnotationRecord {
    std::string image_id;
    std::string category;  // canonical: trimmed, lowercase, aliases applied
    BBox bbox;
    AnnotationFormat source_format = AnnotationFormat::kitti_txt;

    bool operator==(const AnnotationRecord&) const = default;
};

/// Raw label -> canonical label. Keys are matched after lowercase+trim.
using LabelAliases = std::map<std::string, std::string>;

/// lowercase + trim, then alias lookup (the alias target is canonicalized too).
std::string canonical_label(std::string_view raw, const LabelAliases& aliases);

struct ParseOptions {
    LabelAliases aliases;
    // YOLO sidecars. Empty paths default to classes.txt / image_sizes.txt inside
    // the label directory; those two names are never read as label files.
    std::filesystem::path class_map;
    std::filesystem::path image_sizes;
};

struct ParseResult {
    std::vector<AnnotationRecord> records;
    std::size_t degenerate_dropped = 0;  // zero-area or inverted boxes
};

/// Parses one dataset's annotations. `source` is a label file or a directory of
/// label files for the text formats, and a single document for COCO/interchange.
/// An empty source yields no records. Degenerate boxes are dropped and counted.
/// Throws MalformedLine, UnknownImageDimension, or ValidationError when the
/// source is missing.
ParseResult parse_annotations(AnnotationFormat format, const std::filesystem::path& source,
                              const ParseOptions& options = {});

/// Interchange document: {"format":"gcv-annotations","version":1,"records":[...]}.
std::string serialize_records(std::span<const AnnotationRecord> records);
std::vector<AnnotationRecord> deserialize_records(std::string_view document, const std::string& origin = "<memory>");

/// Sorted, de-duplicated set of canonical labels.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> labels);

    static LabelSpace from_records(std::span<const AnnotationRecord> records);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    bool contains(std::string_view label) const;
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t size() const noexcept { return labels_.size(); }

    bool operator==(const LabelSpace&) const = default;

private:
    std::vector<std::string> labels_;
};

/// Throws ValidationError for fewer than two spaces, EmptyIntersection when nothing is shared.
LabelSpace intersect_label_spaces(std::span<const LabelSpace> spaces);

struct ImageGroup {
    std::string image_id;
    std::vector<AnnotationRecord> records;

    bool operator==(const ImageGroup&) const = default;
};

/// Groups records by image id; groups are ordered by id, records keep input order.
std::vector<ImageGroup> group_by_image(std::span<const AnnotationRecord> records);

/// Drops records outside `shared`, then drops images left with no records.
std::vector<ImageGroup> filter_to_shared(std::span<const AnnotationRecord> records, const LabelSpace& shared);

struct SplitOptions {
    std::optional<std::size_t> train_size;  // nullopt = auto (smallest training pool)
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct HarmonizedSplit {
    std::string dataset_id;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::uint64_t seed = 0;
    LabelSpace shared_labels;
    double test_fraction = 0.2;
    std::size_t available_images = 0;  // retained images before the split
    std::size_t training_pool = 0;     // largest train size the dataset supports at test_fraction

    bool operator==(const HarmonizedSplit&) const = default;
};

/// max(1, ceil(test_fraction * train_count)), with a 1e-9 guard so that exact
/// products like 0.2 * 5 never round up to the next integer.
std::size_t test_count_for(std::size_t train_count, double test_fraction);

/// Largest t >= 1 with t + test_count_for(t) <= images, or 0 when none exists.
std::size_t training_pool(std::size_t images, double test_fraction);

/// Deterministic per-dataset split: ids sorted lexicographically, shuffled with
/// seeded_shuffle(seed), first train_size go to train, the next
/// test_count_for(train_size) to test.
std::map<std::string, HarmonizedSplit> make_splits(const std::map<std::string, std::vector<ImageGroup>>& datasets,
                                                   const LabelSpace& shared, const SplitOptions& options);

}  // namespace gcv
