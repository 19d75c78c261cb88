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

#include <Eigen/Dense>

#include "prpmine/binary_matrix.hpp"

namespace prpmine {

/// Result of fitting the signal/noise mixture: x ~ z (x) u plus Bernoulli(r)
/// noise on a fraction epsilon of the entries.
///
/// beta(k, d) is the probability that pattern k does NOT contain permission d;
/// u is its rounding (u = 1 iff beta < 0.5). Patterns are ordered by
/// descending assignment frequency.
struct Factorization {
    BinaryMatrix z;        ///< N x K application -> pattern assignments
    BinaryMatrix u;        ///< K x D pattern -> permission memberships
    Eigen::MatrixXd beta;  ///< K x D
    double r = 0.5;
    double epsilon = 0.0;
    double log_likelihood = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index K() const { return u.rows(); }
    Eigen::Index N() const { return z.rows(); }
    Eigen::Index D() const { return u.cols(); }

    /// Number of applications assigned to each pattern.
    Eigen::VectorXi z_counts() const { return z.col_counts(); }

    /// Throws std::invalid_argument if shapes or parameter ranges are inconsistent.
    void check_invariants() const;
};

/// Annealing schedule and stopping rules for `fit`.
struct FitConfig {
    double initial_temperature = 2.0;
    double cooling_factor = 0.95;
    double final_temperature = 0.05;
    /// Relative change of the tempered objective that ends a temperature level.
    double tolerance = 1e-5;
    int max_inner_iterations = 50;
    /// Below unit temperature, a level whose first sweep moves no parameter by
    /// more than this (and flips no assignment) ends the schedule early.
    double parameter_tolerance = 1e-7;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    /// Throws ConfigError when the schedule is unusable.
    void validate() const;
};

}  // namespace prpmine
