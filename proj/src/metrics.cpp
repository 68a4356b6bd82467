// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gcv/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gcv/errors.hpp"
#include "gcv/util.hpp"

namespace gcv {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

double weighted_forward_sum(const GcvMatrix& g, const std::vector<double>& weights, const char* what) {
    const std::size_t n = g.reference_count();
    if (weights.size() != n) throw std::invalid_argument(std::string(what) + " do not match the matrix");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
        throw std::invalid_argument(std::string(what) + " must sum to 1");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += weights[i] * g.at(0, i + 1);
    return acc;
}

}  // namespace

SimulationWeights simulation_weights(const GcvMatrix& g) {
    const std::size_t n = g.reference_count();
    SimulationWeights out;
    out.reverse_ratios.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.reverse_ratios.push_back(g.at(i, 0));
    const double total = std::accumulate(out.reverse_ratios.begin(), out.reverse_ratios.end(), 0.0);
    if (!(total > 0.0)) throw DegenerateWeights();
    out.weights.reserve(n);
    for (double r : out.reverse_ratios) out.weights.push_back(r / total);
    return out;
}

double simulation_quality(const GcvMatrix& g, const SimulationWeights& w) {
    return weighted_forward_sum(g, w.weights, "simulation weights");
}

TransferWeights transfer_weights(const GcvMatrix& g) {
    const std::size_t n = g.reference_count();
    if (n < 2) throw TooFewReferences(n);

    TransferWeights out;
    out.references = n;
    out.dominance.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r_ij = g.at(i + 1, j + 1);
            const double r_ji = g.at(j + 1, i + 1);
            const double denom = r_ij + r_ji;
            if (!(denom > 0.0)) throw UndefinedDominance(g.dataset_ids()[i + 1], g.dataset_ids()[j + 1]);
            // The smaller share is divided out, the larger is its complement, so
            // C_ij + C_ji == 1 exactly and the result does not depend on index order.
            double& c_ij = out.dominance[i * n + j];
            double& c_ji = out.dominance[j * n + i];
            if (r_ij <= r_ji) {
                c_ij = r_ij / denom;
                c_ji = 1.0 - c_ij;
            } else {
                c_ji = r_ji / denom;
                c_ij = 1.0 - c_ji;
            }
        }
    }

    const double scale = 2.0 / static_cast<double>(n - 1);
    out.raw.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sum += out.dominance[i * n + j];
        }
        out.raw[i] = scale * sum;
    }
    const double total = std::accumulate(out.raw.begin(), out.raw.end(), 0.0);
    out.normalized.reserve(n);
    for (double v : out.raw) out.normalized.push_back(v / total);
    return out;
}

double transfer_quality(const GcvMatrix& g, const TransferWeights& v) {
    return weighted_forward_sum(g, v.normalized, "transfer weights");
}

QualityScores score(const GcvMatrix& g) {
    QualityScores out;
    out.simulation = simulation_weights(g);
    out.a_o = simulation_quality(g, out.simulation);
    if (g.reference_count() >= 2) {
        out.transfer = transfer_weights(g);
        out.s_o = transfer_quality(g, *out.transfer);
    }
    out.matrix_fingerprint = sha256_hex(gcv_to_json(g));
    return out;
}

}  // namespace gcv
