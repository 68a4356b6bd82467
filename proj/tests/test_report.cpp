// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include <json.hpp>

#include "gcv/errors.hpp"
#include "gcv/report.hpp"
#include "gcv/util.hpp"
#include "support.hpp"

using namespace gcv;

namespace {

CrossPerformanceMatrix golden_performance() {
    return matrix_from_json(test::slurp(test::kFixtureDir / "vkitti_table3.json"));
}

bool contains(const std::string& haystack, std::string_view needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("markdown report shows rounded ratios and scores") {
    const auto md = render_report(build_report(golden_performance()), ReportFormat::markdown);
    CHECK(contains(md, "simulation quality A_o = 0.49"));
    CHECK(contains(md, "transfer quality S_o = 0.45"));
    CHECK(contains(md, "| Train \\ Test | vkitti | kitti | bdd100k |"));
    CHECK(contains(md, "| vkitti | 1.00 | 0.66 | 0.39 |"));
    CHECK(contains(md, "| kitti | 0.77 | 1.00 | 0.26 |"));
    CHECK(contains(md, "| bdd100k | 1.24 | 0.90 | 1.00 |"));
    CHECK(contains(md, "| vkitti | 0.936 | 0.618 | 0.365 |"));
    CHECK(contains(md, "Transfer weights: v normalized by sum."));
}

TEST_CASE("ratios above one are reported as warnings") {
    const auto r = build_report(golden_performance());
    REQUIRE(r.warnings.size() == 1);
    CHECK(contains(r.warnings[0], "R[bdd100k -> vkitti] = 1.24"));
    CHECK(contains(r.warnings[0], "kept as is"));
}

TEST_CASE("notes from the matrix document become warnings") {
    const auto r = build_report(golden_performance(), {"kitti: 3 annotated images dropped (image file missing)"});
    CHECK(r.warnings.front() == "kitti: 3 annotated images dropped (image file missing)");
    CHECK(r.warnings.size() == 2);
}

TEST_CASE("single reference prints the unavailable marker") {
    const CrossPerformanceMatrix m({"syn", "ref"}, {0.9, 0.45, 0.6, 0.8}, "map");
    const auto r = build_report(m);
    CHECK_FALSE(r.scores.s_o.has_value());
    CHECK(contains(render_report(r, ReportFormat::markdown), kTransferUnavailable));
    CHECK(contains(render_report(r, ReportFormat::markdown, true), kTransferUnavailable));
    const auto doc = nlohmann::json::parse(report_to_json(r));
    CHECK(doc["scores"]["s_o"].is_null());
    CHECK(doc["scores"]["s_o_status"] == std::string(kTransferUnavailable));
    CHECK(doc["scores"]["transfer"].is_null());
}

TEST_CASE("all-ones matrix renders perfect scores") {
    const auto md = render_report(build_report(CrossPerformanceMatrix(test::make_ids(4), std::vector<double>(16, 0.5), "m")),
                                  ReportFormat::markdown, true);
    CHECK(md == "A_o = 1.00\nS_o = 1.00\n");
}

TEST_CASE("report documents round-trip") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t side = 2 + rng() % 5;
        const CrossPerformanceMatrix m(test::make_ids(side), test::random_cells(rng, side), "ap50");
        const auto r = build_report(m, {"note " + std::to_string(trial)});
        CHECK(report_from_json(report_to_json(r)) == r);
    }
    const auto r = build_report(golden_performance());
    CHECK(report_from_json(report_to_json(r)) == r);
    CHECK(report_to_json(report_from_json(report_to_json(r))) == report_to_json(r));
}

TEST_CASE("damaged report documents are rejected") {
    CHECK_THROWS_AS(report_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(report_from_json("[1, 2]"), ValidationError);
    auto doc = nlohmann::json::parse(report_to_json(build_report(golden_performance())));
    doc["scores"].erase("a_o");
    CHECK_THROWS_AS(report_from_json(doc.dump()), ValidationError);
}

TEST_CASE("json report keeps full precision") {
    const auto doc = nlohmann::json::parse(report_to_json(build_report(golden_performance())));
    CHECK(doc["report"] == "gcv-quality-report");
    CHECK(doc["metadata"]["synthetic_id"] == "vkitti");
    CHECK(doc["metadata"]["metric_name"] == "ap50");
    CHECK(doc["scores"]["a_o"].get<double>() == doctest::Approx(0.49339781943253075).epsilon(1e-12));
    CHECK(doc["scores"]["s_o"].get<double>() == doctest::Approx(0.4504353225727154).epsilon(1e-12));
    CHECK(doc["scores"]["transfer"]["dominance"].size() == 2);
}

TEST_CASE("csv report lists every value") {
    const auto csv = render_report(build_report(golden_performance()), ReportFormat::csv);
    CHECK(csv.rfind("kind,row,column,value\n", 0) == 0);
    CHECK(contains(csv, "performance,bdd100k,vkitti,0.885\n"));
    CHECK(contains(csv, "gcv,vkitti,vkitti,1\n"));
    CHECK(render_report(build_report(golden_performance()), ReportFormat::csv, true).rfind("A_o,S_o\n", 0) == 0);
}

TEST_CASE("format names") {
    CHECK(parse_report_format("md") == ReportFormat::markdown);
    CHECK(parse_report_format("json") == ReportFormat::json);
    CHECK(parse_report_format("csv") == ReportFormat::csv);
    CHECK_THROWS_AS(parse_report_format("xml"), ValidationError);
}

TEST_CASE("scores render at two decimals") {
    CHECK(format_score(0.4934) == "0.49");
    CHECK(format_score(0.456) == "0.46");
    CHECK(format_score(1.0) == "1.00");
}
