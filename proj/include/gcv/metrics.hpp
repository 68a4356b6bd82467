// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gcv/perf_matrix.hpp"

namespace gcv {

/// Weights of the simulation-quality score. Entry i refers to reference i+1
/// of the GCV matrix (index 0 is the synthetic dataset).
struct SimulationWeights {
    std::vector<double> reverse_ratios;  // R_io: reference model evaluated on the synthetic test set
    std::vector<double> weights;         // w_i = R_io / sum_j R_jo

    bool operator==(const SimulationWeights&) const = default;
};

/// Pairwise dominance among references and the resulting transfer weights.
struct TransferWeights {
    std::size_t references = 0;
    std::vector<double> dominance;   // N x N row-major, C_ij = R_ij / (R_ij + R_ji); diagonal is 0 and unused
    std::vector<double> raw;         // v_i = 2/(N-1) * sum_{j != i} C_ij; these sum to N
    std::vector<double> normalized;  // v_i / sum_k v_k

    double c(std::size_t i, std::size_t j) const { return dominance.at(i * references + j); }
    bool operator==(const TransferWeights&) const = default;
};

struct QualityScores {
    double a_o = 0.0;
    std::optional<double> s_o;  // absent when there is only one reference
    SimulationWeights simulation;
    std::optional<TransferWeights> transfer;
    std::string matrix_fingerprint;  // SHA-256 of the GCV matrix interchange document

    bool operator==(const QualityScores&) const = default;
};

/// Throws DegenerateWeights when every R_io is 0.
SimulationWeights simulation_weights(const GcvMatrix& g);

/// A_o = sum_i w_i * R_oi. Throws std::invalid_argument if the weights do not
/// match the matrix or do not sum to 1.
double simulation_quality(const GcvMatrix& g, const SimulationWeights& w);

/// Throws TooFewReferences (N < 2) or UndefinedDominance (R_ij + R_ji == 0).
TransferWeights transfer_weights(const GcvMatrix& g);

/// S_o = sum_i normalized_i * R_oi.
double transfer_quality(const GcvMatrix& g, const TransferWeights& v);

/// Both scores plus every intermediate. With a single reference, S_o and the
/// transfer weights are left empty.
QualityScores score(const GcvMatrix& g);

}  // namespace gcv
