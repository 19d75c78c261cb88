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

// Boolean matrix factorization with a noisy-OR signal model mixed with
// Bernoulli noise, fitted by deterministic-annealing EM.
//
// Model, per entry (i, d):
//   with probability epsilon:      x_id ~ Bernoulli(r)
//   with probability 1 - epsilon:  x_id = 0 with probability q_id = prod_k beta_kd^z_ik
//
// Annealing tempers the posterior of the noise/signal source of each entry
// by 1/T. The tempered log-likelihood
//   L_T = T * sum_id log( (eps p_N)^(1/T) + ((1-eps) p_S)^(1/T) ),
//   p_S(0) = q_id,  p_S(1) = 1 - q_id
// reduces to the ordinary mixture log-likelihood at T = 1 and is
// non-decreasing under em_step at fixed T.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prpmine/binary_matrix.hpp"
#include "prpmine/factorization.hpp"

namespace prpmine {

/// Live optimizer state.
struct FitState {
    Eigen::MatrixXd beta;  ///< K x D, beta(k,d) = p(u_kd = 0)
    BinaryMatrix z;        ///< N x K
    double r = 0.5;
    double epsilon = 0.05;
    double temperature = 1.0;
    /// Tempered log-likelihood at `temperature` (the ordinary one at T = 1).
    double log_likelihood = 0.0;

    Eigen::Index K() const { return beta.rows(); }
};

/// Lower/upper clamp applied to epsilon and r while fitting.
inline constexpr double kNoiseParamFloor = 1e-6;

/// c_id = OR_k (z_ik AND u_kd).
BinaryMatrix boolean_product(const BinaryMatrix& z, const BinaryMatrix& u);

/// q = prod_k beta(k,d)^z_k: probability that the signal model emits 0 at column d.
template <typename Derived>
typename Derived::Scalar signal_bernoulli_param(std::span<const std::uint8_t> z_row,
                                                const Eigen::MatrixBase<Derived>& beta, Eigen::Index d) {
    if (static_cast<Eigen::Index>(z_row.size()) != beta.rows()) {
        throw DimensionError("signal_bernoulli_param: z row length != beta rows");
    }
    typename Derived::Scalar q(1);
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
        if (z_row[static_cast<std::size_t>(k)]) q *= beta(k, d);
    }
    return q;
}

/// u(k,d) = 1 iff beta(k,d) < 0.5; exactly 0.5 rounds to 0.
template <typename Derived>
BinaryMatrix binarize(const Eigen::MatrixBase<Derived>& beta) {
    return BinaryMatrix::from_expression((beta.array() < typename Derived::Scalar(0.5)).template cast<int>());
}

/// Mixture log-likelihood sum_id log(eps p_N + (1-eps) p_S). Returns -inf when
/// some entry has probability zero.
double log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const Eigen::MatrixXd& beta, double r,
                      double epsilon);
double log_likelihood(const BinaryMatrix& x, const FitState& state);

/// L_T at the state's temperature.
double tempered_log_likelihood(const BinaryMatrix& x, const FitState& state);

/// One E/M sweep at the state's temperature: noise responsibilities, closed-form
/// epsilon/r, one EM update of beta, then greedy improving bit flips of z row by
/// row. The returned state carries the new tempered log-likelihood.
FitState em_step(const BinaryMatrix& x, const FitState& state, unsigned threads = 1);

/// Random start: beta ~ U[0.4, 0.6], z bits ~ Bernoulli(min(0.5, 2/K)), eps = 0.05, r = 0.5.
FitState initial_state(const BinaryMatrix& x, int K, std::uint64_t seed, double temperature);

/// Annealed EM from a seeded random start. Patterns in the result are sorted by
/// descending assignment count; patterns nobody uses are reported empty.
Factorization fit(const BinaryMatrix& x, int K, const FitConfig& config);

/// Log-likelihood of one row under binarized patterns, given an assignment.
double assignment_log_likelihood(std::span<const std::uint8_t> x_row, std::span<const std::uint8_t> z_row,
                                 const BinaryMatrix& u, double r, double epsilon);

/// Greedy maximum-likelihood pattern assignment for one row: add the best
/// pattern while the likelihood improves, then drop patterns while that
/// improves. Ties go to the lowest pattern index.
std::vector<std::uint8_t> assign_patterns(std::span<const std::uint8_t> x_row, const BinaryMatrix& u, double r,
                                          double epsilon);

/// assign_patterns applied to every row of x.
BinaryMatrix assign_patterns(const BinaryMatrix& x, const BinaryMatrix& u, double r, double epsilon,
                             unsigned threads = 1);

}  // namespace prpmine
