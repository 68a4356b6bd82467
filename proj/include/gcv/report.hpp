// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gcv/metrics.hpp"
#include "gcv/perf_matrix.hpp"

namespace gcv {

inline constexpr std::string_view kTransferUnavailable = "n/a (requires ≥ 2 references)";
inline constexpr std::string_view kTransferNormalization = "v normalized by sum";

struct ReportMetadata {
    std::string metric_name;
    std::vector<std::string> dataset_ids;  // synthetic first
    std::string generated_at;
    std::string tool_version;

    bool operator==(const ReportMetadata&) const = default;
};

struct QualityReport {
    ReportMetadata metadata;
    CrossPerformanceMatrix performance;
    GcvMatrix gcv;
    QualityScores scores;
    std::vector<std::string> warnings;

    bool operator==(const QualityReport&) const = default;
};

/// Normalizes, scores, and collects warnings (ratios above 1 plus any `notes`
/// carried by the matrix document).
QualityReport build_report(const CrossPerformanceMatrix& matrix, std::vector<std::string> notes = {});

std::string report_to_json(const QualityReport& report);
QualityReport report_from_json(std::string_view document);

enum class ReportFormat { json, markdown, csv };
ReportFormat parse_report_format(std::string_view name);

/// `terse` keeps only the two scores.
std::string render_report(const QualityReport& report, ReportFormat format, bool terse = false);

/// Presentation rounding: scores and GCV ratios at two decimals.
std::string format_score(double value);
std::string render_gcv_markdown(const GcvMatrix& gcv);

}  // namespace gcv
