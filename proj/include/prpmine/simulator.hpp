// Copyright 2026 The prpmine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "prpmine/binary_matrix.hpp"

namespace prpmine {

/// Column means p_d = N^-1 sum_i x_id.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> marginal_probs(const BinaryMatrix& x) {
    if (x.rows() < 1) throw DimensionError("marginal_probs: no rows");
    return x.cast<Scalar>().colwise().mean().transpose();
}

/// N rows with every entry d drawn independently as Bernoulli(p_d).
BinaryMatrix simulate_independent(const Eigen::VectorXd& p, Eigen::Index n, std::uint64_t seed);

struct PlantedModel {
    BinaryMatrix x;
    BinaryMatrix z;
    BinaryMatrix u;
};

struct PlantConfig {
    Eigen::Index n = 1000;
    Eigen::Index d = 50;
    Eigen::Index k = 5;
    double pattern_density = 0.2;
    double assign_density = 0.3;
    double epsilon = 0.0;
    double r = 0.5;
    std::uint64_t seed = 0;
};

/// u ~ Bernoulli(pattern_density), z ~ Bernoulli(assign_density),
/// x = z (x) u with each entry resampled from Bernoulli(r) with probability epsilon.
PlantedModel plant_factorization(const PlantConfig& config);

/// Pair counts of two PCP matrices over logarithmically spaced bins on
/// [threshold, 1]. Off-diagonal pairs below the threshold fall in the lowest bin.
struct PcpHistogram {
    std::vector<double> edges;        ///< bins + 1 log-spaced edges
    std::vector<double> bin_centers;  ///< geometric bin midpoints
    std::vector<std::int64_t> count_real;
    std::vector<std::int64_t> count_sim;
    double underflow_threshold = 1e-3;
};

PcpHistogram pcp_histogram(const Eigen::MatrixXd& pcp_real, const Eigen::MatrixXd& pcp_sim, int bins = 20,
                           double underflow_threshold = 1e-3);

}  // namespace prpmine
