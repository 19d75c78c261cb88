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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prpmine/binary_matrix.hpp"

namespace prpmine {

/// Per-application reconstruction residuals against x* = z (x) u.
struct ErrorRates {
    Eigen::VectorXi fn;  ///< fn(i) = #{d : x_id = 1, x*_id = 0}
    Eigen::VectorXi fp;  ///< fp(i) = #{d : x_id = 0, x*_id = 1}
    double mean_fn = 0.0;
    double mean_fp = 0.0;
    /// Fraction of applications with fn(i) > t (resp. fp(i) > t) for t = 0..max.
    std::vector<double> fraction_fn_above;
    std::vector<double> fraction_fp_above;
};

ErrorRates error_rates(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u);
/// Residuals of x against an already reconstructed x*.
ErrorRates error_rates(const BinaryMatrix& x, const BinaryMatrix& reconstruction);

/// p(s,t) = sum_i x_is x_it / sum_i x_it. Columns of never-requested
/// permissions are zero and listed in undefined_columns.
struct PcpMatrix {
    Eigen::MatrixXd p;
    std::vector<int> undefined_columns;
};

PcpMatrix pcp_matrix(const BinaryMatrix& x);

struct AveragePcp {
    double value = 0.0;
    std::int64_t pairs = 0;   ///< ordered pairs s != t with both permissions requested
    bool degenerate = false;  ///< no such pair exists; value is reported as 0
};

AveragePcp average_pcp(const PcpMatrix& pcp);

/// Fraction of applications assigned to each pattern, sorted descending
/// (stable); order[j] is the original index of the j-th entry.
struct PatternFrequencies {
    Eigen::VectorXd frequency;
    std::vector<int> order;
};

PatternFrequencies pattern_frequencies(const BinaryMatrix& z);

/// Thrown when a divergence is requested for a pattern nobody uses.
class UndefinedDivergence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// KL(p_g || p_k) in bits between the category distribution of all
/// applications and that of the applications assigned pattern k. Every
/// category count in both distributions is increased by `smoothing` first.
double category_divergence(const BinaryMatrix& z, std::span<const std::string> categories, Eigen::Index k,
                           double smoothing = 0.5);

struct PatternSummary {
    int pattern = 0;  ///< index into the factorization's patterns
    double frequency = 0.0;
    std::optional<double> kl_bits;  ///< absent without categories or for unused patterns
    std::vector<int> members;       ///< permission columns with u = 1
};

struct EvaluationReport {
    ErrorRates errors;
    PcpMatrix pcp;
    AveragePcp average;
    std::vector<PatternSummary> patterns;  ///< by descending frequency
};

/// All evaluation quantities for one data set and factorization. Pass an
/// empty category list to skip the divergences.
EvaluationReport evaluate(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u,
                          std::span<const std::string> categories, double smoothing = 0.5);

}  // namespace prpmine
