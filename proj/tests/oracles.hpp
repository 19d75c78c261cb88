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

// Brute-force reference implementations used only by tests. Each follows the
// defining formula directly, without sharing code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prpmine/binary_matrix.hpp"
#include "prpmine/random.hpp"

namespace oracle {

using prpmine::BinaryMatrix;
using prpmine::BitMatrix;

inline BinaryMatrix random_matrix(prpmine::Rng& rng, Eigen::Index rows, Eigen::Index cols, double density) {
    BitMatrix b(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) b(i, j) = prpmine::bernoulli(rng, density) ? 1 : 0;
    }
    return BinaryMatrix(std::move(b));
}

inline Eigen::MatrixXd random_beta(prpmine::Rng& rng, Eigen::Index k, Eigen::Index d) {
    Eigen::MatrixXd beta(k, d);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) beta(a, b) = prpmine::uniform01(rng);
    }
    return beta;
}

inline std::vector<std::vector<int>> boolean_product(const BinaryMatrix& z, const BinaryMatrix& u) {
    std::vector<std::vector<int>> c(static_cast<std::size_t>(z.rows()), std::vector<int>(static_cast<std::size_t>(u.cols()), 0));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index d = 0; d < u.cols(); ++d) {
            for (Eigen::Index k = 0; k < z.cols(); ++k) {
                if (z(i, k) && u(k, d)) c[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = 1;
            }
        }
    }
    return c;
}

/// sum over entries of log(eps p_N(x) + (1-eps) p_S(x)) with probabilities multiplied out.
inline double log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const Eigen::MatrixXd& beta, double r,
                             double eps) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
            double q = 1.0;
            for (Eigen::Index k = 0; k < z.cols(); ++k) {
                if (z(i, k)) q *= beta(k, d);
            }
            const bool xi = x(i, d);
            const double noise = xi ? r : 1.0 - r;
            const double signal = xi ? 1.0 - q : q;
            total += std::log(eps * noise + (1.0 - eps) * signal);
        }
    }
    return total;
}

/// sum over entries of T log((eps p_N)^(1/T) + ((1-eps) p_S)^(1/T)).
inline double tempered_log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const Eigen::MatrixXd& beta,
                                      double r, double eps, double temperature) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
            double q = 1.0;
            for (Eigen::Index k = 0; k < z.cols(); ++k) {
                if (z(i, k)) q *= beta(k, d);
            }
            const bool xi = x(i, d);
            const double noise = eps * (xi ? r : 1.0 - r);
            const double signal = (1.0 - eps) * (xi ? 1.0 - q : q);
            total += temperature * std::log(std::pow(noise, 1.0 / temperature) + std::pow(signal, 1.0 / temperature));
        }
    }
    return total;
}

/// Row log-likelihood with patterns u fixed at 0/1.
inline double row_log_likelihood(const BinaryMatrix& x, Eigen::Index i, const std::vector<int>& z_row,
                                 const BinaryMatrix& u, double r, double eps) {
    double total = 0.0;
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
        int covered = 0;
        for (Eigen::Index k = 0; k < u.rows(); ++k) covered |= z_row[static_cast<std::size_t>(k)] & int(u(k, d));
        const bool xi = x(i, d);
        total += std::log(eps * (xi ? r : 1.0 - r) + (1.0 - eps) * (covered == int(xi) ? 1.0 : 0.0));
    }
    return total;
}

inline Eigen::MatrixXd pcp(const BinaryMatrix& x) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    for (Eigen::Index s = 0; s < x.cols(); ++s) {
        for (Eigen::Index t = 0; t < x.cols(); ++t) {
            double both = 0.0;
            double count_t = 0.0;
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                both += x(i, s) && x(i, t);
                count_t += x(i, t);
            }
            p(s, t) = count_t > 0 ? both / count_t : 0.0;
        }
    }
    return p;
}

inline std::int64_t perm_cost(const BinaryMatrix& u1, const BinaryMatrix& u2, const std::vector<int>& perm) {
    std::int64_t c = 0;
    for (Eigen::Index k = 0; k < u1.rows(); ++k) {
        for (Eigen::Index d = 0; d < u1.cols(); ++d) c += u1(k, d) != u2(perm[static_cast<std::size_t>(k)], d);
    }
    return c;
}

inline std::int64_t min_perm_cost(const BinaryMatrix& u1, const BinaryMatrix& u2) {
    std::vector<int> perm(static_cast<std::size_t>(u1.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
        best = std::min(best, perm_cost(u1, u2, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Smallest number of rows i whose relabeled transferred vector differs from fitted row i.
inline std::int64_t min_row_disagreement(const BinaryMatrix& transferred, const BinaryMatrix& fitted) {
    std::vector<int> perm(static_cast<std::size_t>(fitted.cols()));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
        std::int64_t differ = 0;
        for (Eigen::Index i = 0; i < fitted.rows(); ++i) {
            bool same = true;
            for (Eigen::Index k = 0; k < fitted.cols(); ++k) same = same && transferred(i, k) == fitted(i, perm[static_cast<std::size_t>(k)]);
            differ += !same;
        }
        best = std::min(best, differ);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline double kl_bits(const std::vector<std::string>& categories, const std::vector<int>& member, double smoothing) {
    std::map<std::string, double> all, sub;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        all[categories[i]] += 1.0;
        sub[categories[i]] += member[i] ? 1.0 : 0.0;
    }
    double na = 0.0, ns = 0.0;
    for (auto& [c, v] : all) {
        v += smoothing;
        sub[c] += smoothing;
        na += v;
        ns += sub[c];
    }
    double kl = 0.0;
    for (const auto& [c, v] : all) {
        const double pg = v / na;
        const double pk = sub[c] / ns;
        if (pg > 0) kl += pg * std::log(pg / pk) / std::log(2.0);
    }
    return kl;
}

}  // namespace oracle
