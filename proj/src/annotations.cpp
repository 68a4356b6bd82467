// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/annotations.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/prng.hpp"
#include "gcv/util.hpp"

namespace gcv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AnnotationFormat format) {
    switch (format) {
        case AnnotationFormat::kitti_txt: return "kitti_txt";
        case AnnotationFormat::coco_json: return "coco_json";
        case AnnotationFormat::yolo_txt: return "yolo_txt";
        case AnnotationFormat::interchange: return "interchange";
    }
    return "unknown";
}

AnnotationFormat parse_annotation_format(std::string_view name) {
    for (auto f : {AnnotationFormat::kitti_txt, AnnotationFormat::coco_json, AnnotationFormat::yolo_txt,
                   AnnotationFormat::interchange}) {
        if (to_string(f) == name) return f;
    }
    throw ValidationError("unknown annotation format '" + std::string(name) +
                          "' (expected kitti_txt, coco_json, yolo_txt or interchange)");
}

std::string canonical_label(std::string_view raw, const LabelAliases& aliases) {
    std::string label = to_lower(trim(raw));
    for (const auto& [from, to] : aliases) {
        if (to_lower(trim(from)) == label) return to_lower(trim(to));
    }
    return label;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(std::string_view s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

// Label files of a text-format source, sorted by name. A plain file is its own single entry.
std::vector<fs::path> label_files(const fs::path& source, const std::set<fs::path>& exclude) {
    if (!fs::is_directory(source)) return {source};
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(source)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        if (exclude.contains(fs::weakly_canonical(entry.path()))) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void push_record(ParseResult& out, AnnotationRecord rec) {
    if (rec.bbox.degenerate()) {
        ++out.degenerate_dropped;
        return;
    }
    out.records.push_back(std::move(rec));
}

void parse_kitti(const fs::path& source, const ParseOptions& opts, ParseResult& out) {
    for (const auto& file : label_files(source, {})) {
        const std::string image_id = file.stem().string();
        const auto lines = read_lines(file);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            const auto fields = split_ws(lines[n]);
            if (fields.empty()) continue;
            if (fields.size() < 8) {
                throw MalformedLine(file.string(), n + 1,
                                    "expected at least 8 fields, got " + std::to_string(fields.size()));
            }
            std::array<double, 4> box{};
            for (std::size_t k = 0; k < 4; ++k) {
                const auto v = to_double(fields[4 + k]);
                if (!v) throw MalformedLine(file.string(), n + 1, "field " + std::to_string(5 + k) + " is not a number");
                box[k] = *v;
            }
            std::string category = canonical_label(fields[0], opts.aliases);
            if (category.empty()) throw MalformedLine(file.string(), n + 1, "empty object type");
            push_record(out, {image_id, std::move(category), {box[0], box[1], box[2], box[3]},
                              AnnotationFormat::kitti_txt});
        }
    }
}

void parse_yolo(const fs::path& source, const ParseOptions& opts, ParseResult& out) {
    const fs::path dir = fs::is_directory(source) ? source : source.parent_path();
    const fs::path class_map = opts.class_map.empty() ? dir / "classes.txt" : opts.class_map;
    const fs::path sizes_path = opts.image_sizes.empty() ? dir / "image_sizes.txt" : opts.image_sizes;

    if (!fs::exists(class_map)) throw ValidationError("YOLO class map not found: " + class_map.string());
    std::vector<std::string> classes;
    {
        auto lines = read_lines(class_map);
        while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
        for (std::size_t n = 0; n < lines.size(); ++n) {
            std::string name = canonical_label(lines[n], opts.aliases);
            if (name.empty()) throw MalformedLine(class_map.string(), n + 1, "empty class name");
            classes.push_back(std::move(name));
        }
    }

    std::unordered_map<std::string, std::pair<double, double>> sizes;
    if (fs::exists(sizes_path)) {
        const auto lines = read_lines(sizes_path);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            const auto fields = split_ws(lines[n]);
            if (fields.empty() || fields[0].starts_with('#')) continue;
            if (fields.size() != 3) throw MalformedLine(sizes_path.string(), n + 1, "expected: image_id width height");
            const auto w = to_double(fields[1]);
            const auto h = to_double(fields[2]);
            if (!w || !h || *w <= 0 || *h <= 0) {
                throw MalformedLine(sizes_path.string(), n + 1, "width and height must be positive numbers");
            }
            sizes[std::string(fields[0])] = {*w, *h};
        }
    }

    std::set<fs::path> exclude;
    for (const auto& p : {class_map, sizes_path}) {
        if (fs::exists(p)) exclude.insert(fs::weakly_canonical(p));
    }
    for (const auto& file : label_files(source, exclude)) {
        const std::string image_id = file.stem().string();
        const auto lines = read_lines(file);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            const auto fields = split_ws(lines[n]);
            if (fields.empty()) continue;
            if (fields.size() != 5) {
                throw MalformedLine(file.string(), n + 1, "expected 5 fields (class cx cy w h), got " +
                                                              std::to_string(fields.size()));
            }
            const auto cls = to_integer(fields[0]);
            if (!cls || *cls < 0 || static_cast<std::size_t>(*cls) >= classes.size()) {
                throw MalformedLine(file.string(), n + 1, "class id '" + std::string(fields[0]) + "' not in class map");
            }
            std::array<double, 4> v{};
            for (std::size_t k = 0; k < 4; ++k) {
                const auto d = to_double(fields[1 + k]);
                if (!d) throw MalformedLine(file.string(), n + 1, "field " + std::to_string(2 + k) + " is not a number");
                v[k] = *d;
            }
            if (v[2] < 0 || v[3] < 0) throw MalformedLine(file.string(), n + 1, "negative box size");
            const auto size = sizes.find(image_id);
            if (size == sizes.end()) throw UnknownImageDimension(image_id);
            const auto [width, height] = size->second;
            const BBox box{(v[0] - v[2] / 2) * width, (v[1] - v[3] / 2) * height, (v[0] + v[2] / 2) * width,
                           (v[1] + v[3] / 2) * height};
            push_record(out, {image_id, classes[static_cast<std::size_t>(*cls)], box, AnnotationFormat::yolo_txt});
        }
    }
}

std::string file_stem(const std::string& file_name) {
    fs::path p(file_name);
    return p.stem().string();
}

void parse_coco(const fs::path& source, const ParseOptions& opts, ParseResult& out) {
    const std::string text = read_text_file(source);
    if (trim(text).empty()) return;
    const std::string file = source.string();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedLine(file, 0, std::string("invalid JSON: ") + e.what());
    }
    auto require_array = [&](const char* key) -> const json& {
        static const json empty = json::array();
        if (!doc.contains(key)) return empty;
        if (!doc[key].is_array()) throw MalformedLine(file, 0, std::string("'") + key + "' must be an array");
        return doc[key];
    };
    // COCO ids are integers in practice; strings are tolerated.
    auto id_key = [](const json& id) { return id.is_string() ? id.get<std::string>() : id.dump(); };

    std::unordered_map<std::string, std::string> images;
    const auto& image_list = require_array("images");
    for (std::size_t i = 0; i < image_list.size(); ++i) {
        const auto& img = image_list[i];
        if (!img.contains("id") || !img.contains("file_name") || !img["file_name"].is_string()) {
            throw MalformedLine(file, 0, "images[" + std::to_string(i) + "] needs id and file_name");
        }
        images[id_key(img["id"])] = file_stem(img["file_name"].get<std::string>());
    }
    std::unordered_map<std::string, std::string> categories;
    const auto& category_list = require_array("categories");
    for (std::size_t i = 0; i < category_list.size(); ++i) {
        const auto& cat = category_list[i];
        if (!cat.contains("id") || !cat.contains("name") || !cat["name"].is_string()) {
            throw MalformedLine(file, 0, "categories[" + std::to_string(i) + "] needs id and name");
        }
        std::string name = canonical_label(cat["name"].get<std::string>(), opts.aliases);
        if (name.empty()) throw MalformedLine(file, 0, "categories[" + std::to_string(i) + "] has an empty name");
        categories[id_key(cat["id"])] = std::move(name);
    }
    const auto& annotations = require_array("annotations");
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const auto& ann = annotations[i];
        const std::string where = "annotations[" + std::to_string(i) + "]";
        if (!ann.contains("image_id") || !ann.contains("category_id") || !ann.contains("bbox")) {
            throw MalformedLine(file, 0, where + " needs image_id, category_id and bbox");
        }
        const auto img = images.find(id_key(ann["image_id"]));
        if (img == images.end()) throw MalformedLine(file, 0, where + " references an unknown image_id");
        const auto cat = categories.find(id_key(ann["category_id"]));
        if (cat == categories.end()) throw MalformedLine(file, 0, where + " references an unknown category_id");
        const auto& bbox = ann["bbox"];
        if (!bbox.is_array() || bbox.size() != 4 ||
            !std::all_of(bbox.begin(), bbox.end(), [](const json& v) { return v.is_number(); })) {
            throw MalformedLine(file, 0, where + ".bbox must be [x, y, width, height]");
        }
        const double x = bbox[0].get<double>(), y = bbox[1].get<double>();
        const double w = bbox[2].get<double>(), h = bbox[3].get<double>();
        push_record(out, {img->second, cat->second, {x, y, x + w, y + h}, AnnotationFormat::coco_json});
    }
}

void parse_interchange(const fs::path& source, const ParseOptions& opts, ParseResult& out) {
    const std::string text = read_text_file(source);
    if (trim(text).empty()) return;
    for (auto& rec : deserialize_records(text, source.string())) {
        rec.category = canonical_label(rec.category, opts.aliases);
        push_record(out, std::move(rec));
    }
}

}  // namespace

ParseResult parse_annotations(AnnotationFormat format, const fs::path& source, const ParseOptions& options) {
    if (!fs::exists(source)) throw ValidationError("annotation source not found: " + source.string());
    ParseResult out;
    switch (format) {
        case AnnotationFormat::kitti_txt: parse_kitti(source, options, out); break;
        case AnnotationFormat::coco_json: parse_coco(source, options, out); break;
        case AnnotationFormat::yolo_txt: parse_yolo(source, options, out); break;
        case AnnotationFormat::interchange: parse_interchange(source, options, out); break;
    }
    return out;
}

std::string serialize_records(std::span<const AnnotationRecord> records) {
    json list = json::array();
    for (const auto& r : records) {
        list.push_back({{"image_id", r.image_id},
                        {"category", r.category},
                        {"bbox", {r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max}},
                        {"source_format", to_string(r.source_format)}});
    }
    json doc = {{"format", "gcv-annotations"}, {"version", 1}, {"records", std::move(list)}};
    return doc.dump(1) + "\n";
}

std::vector<AnnotationRecord> deserialize_records(std::string_view document, const std::string& origin) {
    std::vector<AnnotationRecord> out;
    try {
        const json doc = json::parse(document);
        if (doc.value("format", "") != "gcv-annotations") {
            throw MalformedLine(origin, 0, "not a gcv-annotations document");
        }
        const auto& records = doc.at("records");
        out.reserve(records.size());
        for (const auto& r : records) {
            const auto& b = r.at("bbox");
            if (!b.is_array() || b.size() != 4) throw MalformedLine(origin, 0, "bbox must have 4 numbers");
            out.push_back({r.at("image_id").get<std::string>(), r.at("category").get<std::string>(),
                           {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()},
                           parse_annotation_format(r.at("source_format").get<std::string>())});
        }
    } catch (const json::exception& e) {
        throw MalformedLine(origin, 0, std::string("invalid annotation document: ") + e.what());
    }
    return out;
}

LabelSpace::LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

LabelSpace LabelSpace::from_records(std::span<const AnnotationRecord> records) {
    std::vector<std::string> labels;
    labels.reserve(records.size());
    for (const auto& r : records) labels.push_back(r.category);
    return LabelSpace(std::move(labels));
}

bool LabelSpace::contains(std::string_view label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label, std::less<>{});
}

LabelSpace intersect_label_spaces(std::span<const LabelSpace> spaces) {
    if (spaces.size() < 2) throw ValidationError("label space intersection needs at least two datasets");
    std::vector<std::string> acc = spaces.front().labels();
    for (const auto& space : spaces.subspan(1)) {
        std::vector<std::string> next;
        std::set_intersection(acc.begin(), acc.end(), space.labels().begin(), space.labels().end(),
                              std::back_inserter(next));
        acc = std::move(next);
    }
    if (acc.empty()) throw EmptyIntersection();
    return LabelSpace(std::move(acc));
}

std::vector<ImageGroup> group_by_image(std::span<const AnnotationRecord> records) {
    std::map<std::string, std::vector<AnnotationRecord>> by_id;
    for (const auto& r : records) by_id[r.image_id].push_back(r);
    std::vector<ImageGroup> out;
    out.reserve(by_id.size());
    for (auto& [id, recs] : by_id) out.push_back({id, std::move(recs)});
    return out;
}

std::vector<ImageGroup> filter_to_shared(std::span<const AnnotationRecord> records, const LabelSpace& shared) {
    std::vector<AnnotationRecord> kept;
    std::copy_if(records.begin(), records.end(), std::back_inserter(kept),
                 [&](const AnnotationRecord& r) { return shared.contains(r.category); });
    return group_by_image(kept);
}

std::size_t test_count_for(std::size_t train_count, double test_fraction) {
    const double raw = std::ceil(test_fraction * static_cast<double>(train_count) - 1e-9);
    return std::max<std::size_t>(1, raw > 0 ? static_cast<std::size_t>(raw) : 0);
}

std::size_t training_pool(std::size_t images, double test_fraction) {
    if (images < 2) return 0;
    auto t = std::min<std::size_t>(images - 1,
                                   static_cast<std::size_t>(static_cast<double>(images) / (1.0 + test_fraction)) + 2);
    while (t > 0 && t + test_count_for(t, test_fraction) > images) --t;
    return t;
}

std::map<std::string, HarmonizedSplit> make_splits(const std::map<std::string, std::vector<ImageGroup>>& datasets,
                                                   const LabelSpace& shared, const SplitOptions& options) {
    if (!(options.test_fraction > 0.0) || !std::isfinite(options.test_fraction)) {
        throw ValidationError("test_fraction must be a positive finite ratio");
    }
    if (options.train_size && *options.train_size == 0) throw ValidationError("train_size must be positive");

    std::map<std::string, std::size_t> pools;
    for (const auto& [id, groups] : datasets) {
        if (groups.size() < 2) throw InsufficientSamples(id, 2, groups.size());
        pools[id] = training_pool(groups.size(), options.test_fraction);
    }
    std::size_t train_size = 0;
    if (options.train_size) {
        train_size = *options.train_size;
    } else if (!pools.empty()) {
        train_size = std::min_element(pools.begin(), pools.end(), [](const auto& a, const auto& b) {
                         return a.second < b.second;
                     })->second;
    }

    std::map<std::string, HarmonizedSplit> out;
    for (const auto& [id, groups] : datasets) {
        if (train_size > pools[id]) throw InsufficientSamples(id, train_size, pools[id]);

        std::vector<std::string> ids;
        ids.reserve(groups.size());
        for (const auto& g : groups) ids.push_back(g.image_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        seeded_shuffle(std::span<std::string>(ids), options.seed);

        const std::size_t test_size = std::min(test_count_for(train_size, options.test_fraction), ids.size() - train_size);
        HarmonizedSplit split;
        split.dataset_id = id;
        split.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_size));
        split.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_size),
                              ids.begin() + static_cast<std::ptrdiff_t>(train_size + test_size));
        split.seed = options.seed;
        split.shared_labels = shared;
        split.test_fraction = options.test_fraction;
        split.available_images = ids.size();
        split.training_pool = pools[id];
        out.emplace(id, std::move(split));
    }
    return out;
}

}  // namespace gcv
