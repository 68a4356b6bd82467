// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "gcv/annotations.hpp"
#include "gcv/errors.hpp"
#include "support.hpp"

using namespace gcv;
using gcv::test::TempDir;
using gcv::test::write_text;

namespace {

std::vector<ImageGroup> groups_of(std::size_t count, const std::string& prefix = "img") {
    std::vector<AnnotationRecord> records;
    for (std::size_t i = 0; i < count; ++i) {
        records.push_back({prefix + std::to_string(1000 + i), "car", {0, 0, 10, 10}, AnnotationFormat::kitti_txt});
    }
    return group_by_image(records);
}

std::set<std::string> as_set(const std::vector<std::string>& ids) { return {ids.begin(), ids.end()}; }

}  // namespace

TEST_CASE("canonical labels are trimmed, lowercased, then aliased") {
    CHECK(canonical_label("  Car ", {}) == "car");
    CHECK(canonical_label("Pedestrian", {{"pedestrian", "person"}}) == "person");
    CHECK(canonical_label("VEHICLE", {{" Vehicle", "car"}}) == "car");
    CHECK(canonical_label("truck", {{"pedestrian", "person"}}) == "truck");
}

TEST_CASE("KITTI line maps type and box fields") {
    TempDir dir;
    write_text(dir / "000000.txt",
               "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n");
    const auto result = parse_annotations(AnnotationFormat::kitti_txt, dir / "000000.txt");
    REQUIRE(result.records.size() == 1);
    const auto& r = result.records[0];
    CHECK(r.image_id == "000000");
    CHECK(r.category == "car");
    CHECK(r.bbox == BBox{587.01, 173.33, 614.12, 200.12});
    CHECK(r.source_format == AnnotationFormat::kitti_txt);
}

TEST_CASE("KITTI directory is read in file-name order and degenerate boxes are dropped") {
    TempDir dir;
    write_text(dir / "b.txt", "Van 0 0 0 1 1 5 5\n");
    write_text(dir / "a.txt", "Car 0 0 0 1 1 5 5\nCar 0 0 0 3 1 3 5\n\n");
    write_text(dir / "notes.md", "ignored\n");
    const auto result = parse_annotations(AnnotationFormat::kitti_txt, dir.path());
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].image_id == "a");
    CHECK(result.records[1].image_id == "b");
    CHECK(result.degenerate_dropped == 1);
}

TEST_CASE("KITTI malformed lines report file and line") {
    TempDir dir;
    write_text(dir / "x.txt", "Car 0 0 0 1 1 5 5\nCar 0 0 0 1 1\n");
    try {
        parse_annotations(AnnotationFormat::kitti_txt, dir / "x.txt");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(e.line() == 2);
        CHECK(e.file().find("x.txt") != std::string::npos);
    }
    write_text(dir / "y.txt", "Car 0 0 0 1 one 5 5\n");
    CHECK_THROWS_AS(parse_annotations(AnnotationFormat::kitti_txt, dir / "y.txt"), MalformedLine);
}

TEST_CASE("empty annotation source yields no records") {
    TempDir dir;
    write_text(dir / "empty.txt", "");
    CHECK(parse_annotations(AnnotationFormat::kitti_txt, dir / "empty.txt").records.empty());
    write_text(dir / "empty.json", "");
    CHECK(parse_annotations(AnnotationFormat::interchange, dir / "empty.json").records.empty());
}

TEST_CASE("missing annotation source is a validation error") {
    CHECK_THROWS_AS(parse_annotations(AnnotationFormat::kitti_txt, "/nonexistent/labels"), ValidationError);
}

TEST_CASE("YOLO center-size boxes become absolute corners") {
    TempDir dir;
    write_text(dir / "labels/img.txt", "0 0.5 0.5 0.2 0.2\n");
    write_text(dir / "labels/classes.txt", "Car\n");
    write_text(dir / "labels/image_sizes.txt", "img 1000 800\n");
    const auto result = parse_annotations(AnnotationFormat::yolo_txt, dir / "labels");
    REQUIRE(result.records.size() == 1);
    const auto& b = result.records[0].bbox;
    CHECK(result.records[0].category == "car");
    CHECK(b.x_min == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(b.y_min == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(b.x_max == doctest::Approx(600.0).epsilon(1e-12));
    CHECK(b.y_max == doctest::Approx(480.0).epsilon(1e-12));
}

TEST_CASE("YOLO conversion round-trips through an independent inverse") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_int_distribution<int> dim(64, 4096);
    TempDir dir;
    std::string labels;
    std::string sizes;
    struct Case {
        double cx, cy, w, h;
        int width, height;
    };
    std::vector<Case> cases;
    for (int i = 0; i < 50; ++i) {
        Case c{unit(rng), unit(rng), 0.0, 0.0, dim(rng), dim(rng)};
        c.w = std::min(c.cx, 1.0 - c.cx) * unit(rng);
        c.h = std::min(c.cy, 1.0 - c.cy) * unit(rng);
        cases.push_back(c);
        char line[160];
        std::snprintf(line, sizeof line, "0 %.17g %.17g %.17g %.17g\n", c.cx, c.cy, c.w, c.h);
        write_text(dir / ("labels/im" + std::to_string(100 + i) + ".txt"), line);
        sizes += "im" + std::to_string(100 + i) + " " + std::to_string(c.width) + " " + std::to_string(c.height) + "\n";
    }
    write_text(dir / "labels/classes.txt", "car\n");
    write_text(dir / "labels/image_sizes.txt", sizes);
    const auto records = parse_annotations(AnnotationFormat::yolo_txt, dir / "labels").records;
    REQUIRE(records.size() == cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& b = records[i].bbox;
        const auto& c = cases[i];
        const double cx = (b.x_min + b.x_max) / 2.0 / c.width;
        const double cy = (b.y_min + b.y_max) / 2.0 / c.height;
        const double w = (b.x_max - b.x_min) / c.width;
        const double h = (b.y_max - b.y_min) / c.height;
        CHECK(std::abs(cx - c.cx) < 1e-12);
        CHECK(std::abs(cy - c.cy) < 1e-12);
        CHECK(std::abs(w - c.w) < 1e-12);
        CHECK(std::abs(h - c.h) < 1e-12);
    }
}

TEST_CASE("YOLO without a size entry raises UnknownImageDimension") {
    TempDir dir;
    write_text(dir / "labels/a.txt", "0 0.5 0.5 0.2 0.2\n");
    write_text(dir / "labels/classes.txt", "car\n");
    write_text(dir / "labels/image_sizes.txt", "b 100 100\n");
    try {
        parse_annotations(AnnotationFormat::yolo_txt, dir / "labels");
        FAIL("expected UnknownImageDimension");
    } catch (const UnknownImageDimension& e) {
        CHECK(e.image_id() == "a");
    }
}

TEST_CASE("YOLO class index outside the class map is malformed") {
    TempDir dir;
    write_text(dir / "labels/a.txt", "3 0.5 0.5 0.2 0.2\n");
    write_text(dir / "labels/classes.txt", "car\n");
    write_text(dir / "labels/image_sizes.txt", "a 100 100\n");
    CHECK_THROWS_AS(parse_annotations(AnnotationFormat::yolo_txt, dir / "labels"), MalformedLine);
}

TEST_CASE("COCO reads images, annotations and categories only") {
    TempDir dir;
    write_text(dir / "ann.json", R"({
      "info": {"year": 2020},
      "images": [{"id": 7, "file_name": "frames/0007.jpg", "width": 640, "height": 480}],
      "annotations": [{"id": 1, "image_id": 7, "category_id": 3, "bbox": [10, 20, 30, 40], "segmentation": []}],
      "categories": [{"id": 3, "name": " Person", "supercategory": "human"}]
    })");
    const auto records = parse_annotations(AnnotationFormat::coco_json, dir / "ann.json").records;
    REQUIRE(records.size() == 1);
    CHECK(records[0].image_id == "0007");
    CHECK(records[0].category == "person");
    CHECK(records[0].bbox == BBox{10, 20, 40, 60});
}

TEST_CASE("COCO references to unknown ids are rejected") {
    TempDir dir;
    write_text(dir / "ann.json", R"({"images": [{"id": 1, "file_name": "a.jpg", "width": 1, "height": 1}],
      "annotations": [{"image_id": 1, "category_id": 9, "bbox": [0, 0, 1, 1]}], "categories": []})");
    CHECK_THROWS_AS(parse_annotations(AnnotationFormat::coco_json, dir / "ann.json"), ValidationError);
}

TEST_CASE("interchange round-trip preserves random record sequences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(-1e4, 1e4);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<std::string> labels{"car", "person", "traffic light", "bus"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnnotationRecord> records;
        const int n = static_cast<int>(rng() % 20);
        for (int i = 0; i < n; ++i) {
            const double x = coord(rng);
            const double y = coord(rng);
            records.push_back({"im/" + std::to_string(rng() % 7), labels[pick(rng)],
                               {x, y, x + std::abs(coord(rng)) + 1e-3, y + std::abs(coord(rng)) + 1e-3},
                               static_cast<AnnotationFormat>(pick(rng))});
        }
        CHECK(deserialize_records(serialize_records(records)) == records);
    }
}

TEST_CASE("label space intersection") {
    const LabelSpace a({"car", "person"});
    const LabelSpace b({"truck", "car"});
    const LabelSpace c({"car"});
    CHECK(intersect_label_spaces(std::vector{a, b}) == LabelSpace({"car"}));
    CHECK(intersect_label_spaces(std::vector{c, c, c}) == LabelSpace({"car"}));
    CHECK_THROWS_AS(intersect_label_spaces(std::vector{LabelSpace({"car"}), LabelSpace({"person"})}), EmptyIntersection);
    CHECK_THROWS(intersect_label_spaces(std::vector{a}));
}

TEST_CASE("label space intersection ignores input order") {
    std::mt19937_64 rng(17);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LabelSpace> spaces;
        for (int k = 0; k < 4; ++k) {
            std::vector<std::string> labels{"a"};
            for (const auto& v : vocab) {
                if (rng() % 2) labels.push_back(v);
            }
            spaces.emplace_back(labels);
        }
        const auto expected = intersect_label_spaces(spaces);
        std::shuffle(spaces.begin(), spaces.end(), rng);
        CHECK(intersect_label_spaces(spaces) == expected);
        // Associativity: fold the first pair, then the rest.
        std::vector<LabelSpace> folded{intersect_label_spaces(std::vector{spaces[0], spaces[1]}), spaces[2], spaces[3]};
        CHECK(intersect_label_spaces(folded) == expected);
        CHECK(std::is_sorted(expected.labels().begin(), expected.labels().end()));
    }
}

TEST_CASE("filter keeps shared records and drops images without any") {
    const std::vector<AnnotationRecord> records{
        {"a", "car", {0, 0, 1, 1}, AnnotationFormat::coco_json},
        {"a", "person", {0, 0, 1, 1}, AnnotationFormat::coco_json},
        {"b", "person", {0, 0, 1, 1}, AnnotationFormat::coco_json},
    };
    const auto groups = filter_to_shared(records, LabelSpace({"car"}));
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].image_id == "a");
    REQUIRE(groups[0].records.size() == 1);
    CHECK(groups[0].records[0].category == "car");
    CHECK(filter_to_shared({}, LabelSpace({"car"})).empty());
}

TEST_CASE("filter is idempotent") {
    std::mt19937_64 rng(23);
    const std::vector<std::string> vocab{"car", "person", "bus", "truck"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AnnotationRecord> records;
        for (int i = 0; i < 30; ++i) {
            records.push_back({"im" + std::to_string(rng() % 10), vocab[rng() % vocab.size()], {0, 0, 1, 1},
                               AnnotationFormat::kitti_txt});
        }
        const LabelSpace shared({vocab[rng() % 2], vocab[2 + rng() % 2]});
        const auto once = filter_to_shared(records, shared);
        std::vector<AnnotationRecord> flat;
        for (const auto& g : once) flat.insert(flat.end(), g.records.begin(), g.records.end());
        CHECK(filter_to_shared(flat, shared) == once);
        for (const auto& g : once) {
            CHECK_FALSE(g.records.empty());
            for (const auto& r : g.records) CHECK(shared.contains(r.category));
        }
    }
}

TEST_CASE("split size arithmetic") {
    CHECK(test_count_for(2, 0.5) == 1);
    CHECK(test_count_for(7400, 0.2) == 1480);
    CHECK(test_count_for(3, 0.2) == 1);
    CHECK(training_pool(4, 0.5) == 2);
    CHECK(training_pool(1000, 0.5) == 666);
    CHECK(training_pool(10, 0.2) == 8);
    for (std::size_t n = 2; n < 300; ++n) {
        for (double f : {0.1, 0.2, 0.25, 0.5, 1.0}) {
            const std::size_t t = training_pool(n, f);
            CHECK(t + test_count_for(t, f) <= n);
            CHECK(((t + 1) + test_count_for(t + 1, f) > n));
        }
    }
}

TEST_CASE("four images, two for training") {
    const std::map<std::string, std::vector<ImageGroup>> data{{"d", groups_of(4)}};
    const auto splits = make_splits(data, LabelSpace({"car"}), SplitOptions{2, 0.5, 0});
    const auto& s = splits.at("d");
    CHECK(s.train_ids.size() == 2);
    CHECK(s.test_ids.size() == 1);
    for (const auto& id : s.test_ids) CHECK(std::find(s.train_ids.begin(), s.train_ids.end(), id) == s.train_ids.end());
}

TEST_CASE("explicit train size above the pool is InsufficientSamples") {
    const std::map<std::string, std::vector<ImageGroup>> data{{"d", groups_of(8750)}};
    try {
        make_splits(data, LabelSpace({"car"}), SplitOptions{7400, 0.25, 0});
        FAIL("expected InsufficientSamples");
    } catch (const InsufficientSamples& e) {
        CHECK(e.dataset_id() == "d");
        CHECK(e.needed() == 7400);
        CHECK(e.available() == 7000);
    }
}

TEST_CASE("splits are deterministic, disjoint and equal in train size") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::map<std::string, std::vector<ImageGroup>> data;
        const int datasets = 2 + static_cast<int>(rng() % 3);
        for (int d = 0; d < datasets; ++d) data["d" + std::to_string(d)] = groups_of(2 + rng() % 60, "x" + std::to_string(d));
        const SplitOptions opts{std::nullopt, trial % 2 ? 0.2 : 0.5, rng()};
        const auto first = make_splits(data, LabelSpace({"car"}), opts);
        CHECK(make_splits(data, LabelSpace({"car"}), opts) == first);

        std::size_t min_pool = SIZE_MAX;
        for (const auto& [id, groups] : data) min_pool = std::min(min_pool, training_pool(groups.size(), opts.test_fraction));
        for (const auto& [id, s] : first) {
            CHECK(s.train_ids.size() == min_pool);
            CHECK(s.test_ids.size() == test_count_for(min_pool, opts.test_fraction));
            const auto train = as_set(s.train_ids);
            CHECK(train.size() == s.train_ids.size());
            for (const auto& t : s.test_ids) CHECK(train.count(t) == 0);
        }
    }
}

TEST_CASE("different seeds give different permutations") {
    const std::map<std::string, std::vector<ImageGroup>> data{{"d", groups_of(200)}};
    const auto a = make_splits(data, LabelSpace({"car"}), SplitOptions{100, 0.2, 1}).at("d");
    const auto b = make_splits(data, LabelSpace({"car"}), SplitOptions{100, 0.2, 2}).at("d");
    CHECK(a.train_ids != b.train_ids);
}
