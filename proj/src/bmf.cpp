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

#include "prpmine/bmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "bmf_internal.hpp"
#include "prpmine/parallel.hpp"
#include "prpmine/random.hpp"

namespace prpmine {

namespace {

using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using detail::kNegInf;

double clamp_noise(double v) { return std::clamp(v, kNoiseParamFloor, 1.0 - kNoiseParamFloor); }

/// Lookup tables for one (beta, r, eps, T). Only the noise/signal source is
/// tempered; patterns enter through q = prod_k beta_kd^z_ik alone.
struct Tables {
    double temperature = 1.0;
    double inv_t = 1.0;
    RowMajorXd lb;      ///< log beta, -inf where beta = 0
    RowMajorXd beta;    ///< beta
    RowMajorXd bt;      ///< beta^(1/T)
    RowMajorXd inv_bt;  ///< beta^(-1/T) (inf where beta = 0)
    double noise1 = 0.0;  ///< log(eps r) / T
    double noise0 = 0.0;  ///< log(eps (1-r)) / T
    double signal = 0.0;  ///< log(1-eps) / T
};

Tables make_tables(const Eigen::MatrixXd& beta, double r, double epsilon, double temperature) {
    Tables t;
    t.temperature = temperature;
    t.inv_t = 1.0 / temperature;
    t.beta = beta;
    t.lb = beta.array().log();
    t.bt = (t.lb * t.inv_t).array().exp();
    t.inv_bt = (-t.lb * t.inv_t).array().exp();
    t.noise1 = (detail::safe_log(epsilon) + detail::safe_log(r)) * t.inv_t;
    t.noise0 = (detail::safe_log(epsilon) + detail::safe_log(1.0 - r)) * t.inv_t;
    t.signal = detail::safe_log(1.0 - epsilon) * t.inv_t;
    return t;
}

/// log p_S(x) given log q.
inline double log_signal(bool x, double lq) { return x ? std::log(-std::expm1(lq)) : lq; }

/// Tempered signal term log((1-eps) p_S)^(1/T).
inline double signal_term(bool x, double lq, const Tables& t) { return t.signal + log_signal(x, lq) * t.inv_t; }

/// log of (eps p_N)^(1/T) + ((1-eps) p_S)^(1/T).
inline double entry_log_mix(bool x, double lq, const Tables& t) {
    return detail::log_add_exp(x ? t.noise1 : t.noise0, signal_term(x, lq, t));
}

/// Tempered noise and signal shares of one entry; the larger one is taken as
/// the complement of the smaller.
inline void source_shares(double noise, double signal, double log_mix, double& rho, double& w) {
    if (noise > signal) {
        w = std::exp(signal - log_mix);
        rho = 1.0 - w;
    } else {
        rho = std::exp(noise - log_mix);
        w = 1.0 - rho;
    }
}

/// Per-column state of one row under its current assignment:
///   log q = sum_k log beta (finite part + number of -inf terms) and the
///   tempered log mixture. The ratio coefficients express mix'/mix after
///   adding or removing one pattern without leaving probability space:
///   mix'/mix = rho + w * (p_S'/p_S)^(1/T).
struct RowWork {
    std::vector<double> q_finite, signal, log_mix, rho, w, q_val, one_minus_q;
    std::vector<int> q_inf;

    explicit RowWork(Eigen::Index dim)
        : q_finite(dim), signal(dim), log_mix(dim), rho(dim), w(dim), q_val(dim), one_minus_q(dim), q_inf(dim) {}

    double q(std::size_t d) const { return q_inf[d] > 0 ? kNegInf : q_finite[d]; }

    /// Rebuilds sums and log_mix; returns sum_d log_mix.
    double rebuild(const Tables& t, std::span<const std::uint8_t> x_row, std::span<const std::uint8_t> z_row) {
        std::fill(q_finite.begin(), q_finite.end(), 0.0);
        std::fill(q_inf.begin(), q_inf.end(), 0);
        for (std::size_t k = 0; k < z_row.size(); ++k) {
            if (!z_row[k]) continue;
            const double* lb = t.lb.row(static_cast<Eigen::Index>(k)).data();
            for (std::size_t d = 0; d < q_finite.size(); ++d) {
                if (lb[d] == kNegInf) {
                    ++q_inf[d];
                } else {
                    q_finite[d] += lb[d];
                }
            }
        }
        double total = 0.0;
        for (std::size_t d = 0; d < q_finite.size(); ++d) {
            const bool xi = x_row[d] != 0;
            signal[d] = signal_term(xi, q(d), t);
            log_mix[d] = detail::log_add_exp(xi ? t.noise1 : t.noise0, signal[d]);
            total += log_mix[d];
        }
        return total;
    }

    void compute_ratios(const Tables& t, std::span<const std::uint8_t> x_row) {
        for (std::size_t d = 0; d < q_finite.size(); ++d) {
            const bool xi = x_row[d] != 0;
            const double lq = q(d);
            source_shares(xi ? t.noise1 : t.noise0, signal[d], log_mix[d], rho[d], w[d]);
            if (lq > -std::numbers::ln2) {
                one_minus_q[d] = -std::expm1(lq);
                q_val[d] = 1.0 - one_minus_q[d];
            } else {
                q_val[d] = std::exp(lq);
                one_minus_q[d] = 1.0 - q_val[d];
            }
        }
    }

    /// Exact log(mix'/mix) at column d after toggling pattern k.
    double exact_entry_delta(const Tables& t, bool xi, std::size_t d, Eigen::Index k, bool on) const {
        const double lb = t.lb(k, static_cast<Eigen::Index>(d));
        double lq;
        if (lb == kNegInf) {
            lq = q_inf[d] + (on ? -1 : 1) > 0 ? kNegInf : q_finite[d];
        } else {
            lq = q_inf[d] > 0 ? kNegInf : q_finite[d] + (on ? -lb : lb);
        }
        return entry_log_mix(xi, lq, t) - log_mix[d];
    }

    /// Change of sum_d log_mix when toggling pattern k (requires compute_ratios).
    double flip_delta(const Tables& t, std::span<const std::uint8_t> x_row, Eigen::Index k, bool on) const {
        const double* bt = (on ? t.inv_bt : t.bt).row(k).data();
        const double* beta = t.beta.row(k).data();
        const double* lb = t.lb.row(k).data();
        const bool unit = t.temperature == 1.0;
        double log_acc = 0.0;
        double prod = 1.0;
        for (std::size_t d = 0; d < q_finite.size(); ++d) {
            const bool xi = x_row[d] != 0;
            double ratio = 0.0;
            bool exact = (on && !(lb[d] > -700.0)) || q_inf[d] > 0;
            if (!exact) {
                if (xi) {
                    const double q_new = on ? q_val[d] / beta[d] : q_val[d] * beta[d];
                    const double s_new = 1.0 - q_new;
                    exact = one_minus_q[d] < 1e-6 || s_new < 1e-6;
                    if (!exact) {
                        const double rel = s_new / one_minus_q[d];
                        ratio = rho[d] + w[d] * (unit ? rel : std::exp(std::log(rel) * t.inv_t));
                    }
                } else {
                    ratio = rho[d] + w[d] * bt[d];
                }
                exact = exact || !(ratio > 1e-280 && ratio < 1e280);
            }
            if (exact) {
                log_acc += exact_entry_delta(t, xi, d, k, on);
                continue;
            }
            prod *= ratio;
            if (prod < 1e-200 || prod > 1e200) {
                log_acc += std::log(prod);
                prod = 1.0;
            }
        }
        return log_acc + std::log(prod);
    }
};

double total_tempered(const BinaryMatrix& x, const BinaryMatrix& z, const Tables& t) {
    RowWork work(x.cols());
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) total += work.rebuild(t, x.row(i), z.row(i));
    return t.temperature * total;
}

void check_shapes(const BinaryMatrix& x, const BinaryMatrix& z, const Eigen::MatrixXd& beta) {
    if (z.rows() != x.rows()) throw DimensionError("z rows != x rows");
    if (z.cols() != beta.rows()) throw DimensionError("z columns != beta rows");
    if (beta.cols() != x.cols()) throw DimensionError("beta columns != x columns");
}

struct StepStats {
    double max_parameter_change = 0.0;
    std::int64_t flips = 0;
};

// Rows are processed in a fixed number of contiguous blocks whose partial
// sums are combined in block order, so results do not depend on the thread count.
constexpr std::size_t kReductionBlocks = 64;

struct BlockAccumulator {
    RowMajorXd num;
    RowMajorXd den;
    double rho = 0.0;
    double rho_x = 0.0;
};

/// E-step plus closed-form M-step for eps, r and beta. The source posterior
/// is tempered; the posterior of which assigned pattern stayed silent is the
/// untempered one given that the signal produced x.
void update_parameters(const BinaryMatrix& x, const FitState& in, FitState& out, StepStats& stats,
                       unsigned threads) {
    const Eigen::Index n = x.rows();
    const Eigen::Index dim = x.cols();
    const Eigen::Index k_count = in.K();
    const Tables t = make_tables(in.beta, in.r, in.epsilon, in.temperature);

    const std::size_t block_rows = (static_cast<std::size_t>(n) + kReductionBlocks - 1) / kReductionBlocks;
    const std::size_t blocks = (static_cast<std::size_t>(n) + block_rows - 1) / block_rows;
    std::vector<BlockAccumulator> acc(blocks);

    parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
        RowWork work(dim);
        std::vector<Eigen::Index> assigned;
        for (std::size_t blk = begin; blk < end; ++blk) {
            BlockAccumulator& a = acc[blk];
            a.num = RowMajorXd::Zero(k_count, dim);
            a.den = RowMajorXd::Zero(k_count, dim);
            const std::size_t row_end = std::min(static_cast<std::size_t>(n), (blk + 1) * block_rows);
            for (std::size_t ii = blk * block_rows; ii < row_end; ++ii) {
                const auto i = static_cast<Eigen::Index>(ii);
                const auto x_row = x.row(i);
                const auto z_row = in.z.row(i);
                work.rebuild(t, x_row, z_row);
                assigned.clear();
                for (Eigen::Index k = 0; k < k_count; ++k) {
                    if (z_row[static_cast<std::size_t>(k)]) assigned.push_back(k);
                }
                for (std::size_t d = 0; d < static_cast<std::size_t>(dim); ++d) {
                    const bool xi = x_row[d] != 0;
                    const double lq = work.q(d);
                    double rho;
                    double w;
                    source_shares(xi ? t.noise1 : t.noise0, work.signal[d], work.log_mix[d], rho, w);
                    a.rho += rho;
                    if (xi) a.rho_x += rho;
                    if (!(w > 0.0)) continue;
                    const auto dd = static_cast<Eigen::Index>(d);
                    const double some_emitted = -std::expm1(lq);
                    for (const Eigen::Index k : assigned) {
                        a.den(k, dd) += w;
                        if (!xi) {
                            a.num(k, dd) += w;
                            continue;
                        }
                        if (t.lb(k, dd) == kNegInf) continue;
                        // p(pattern k silent | some assigned pattern emitted)
                        //   = beta_k (1 - prod_{j != k} beta_j) / (1 - prod_j beta_j)
                        double others_emitted = 1.0;
                        if (work.q_inf[d] == 0) {
                            double lq_without = 0.0;
                            for (const Eigen::Index j : assigned) {
                                if (j != k) lq_without += t.lb(j, dd);
                            }
                            others_emitted = -std::expm1(lq_without);
                        }
                        const double silent = t.beta(k, dd) * others_emitted / some_emitted;
                        a.num(k, dd) += w * std::clamp(silent, 0.0, 1.0);
                    }
                }
            }
        }
    });

    RowMajorXd num = RowMajorXd::Zero(k_count, dim);
    RowMajorXd den = RowMajorXd::Zero(k_count, dim);
    double rho_total = 0.0;
    double rho_x_total = 0.0;
    for (const auto& a : acc) {
        num += a.num;
        den += a.den;
        rho_total += a.rho;
        rho_x_total += a.rho_x;
    }
    out.epsilon = clamp_noise(rho_total / static_cast<double>(n * dim));
    out.r = rho_total > 0.0 ? clamp_noise(rho_x_total / rho_total) : clamp_noise(in.r);

    out.beta = in.beta;
    for (Eigen::Index k = 0; k < k_count; ++k) {
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (den(k, d) > 0.0) out.beta(k, d) = std::clamp(num(k, d) / den(k, d), 0.0, 1.0);
        }
    }
    stats.max_parameter_change =
        std::max({std::abs(out.epsilon - in.epsilon), std::abs(out.r - in.r),
                  k_count > 0 ? (out.beta - in.beta).cwiseAbs().maxCoeff() : 0.0});
}

/// Greedy improving single-bit flips of every z row; returns the tempered objective.
double update_assignments(const BinaryMatrix& x, FitState& state, StepStats& stats, unsigned threads) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k_count = state.K();
    const Tables t = make_tables(state.beta, state.r, state.epsilon, state.temperature);
    BitMatrix z = state.z.bits();
    std::vector<double> row_values(static_cast<std::size_t>(n), 0.0);
    std::vector<std::int64_t> row_flips(static_cast<std::size_t>(n), 0);
    const int max_sweeps = 4 * static_cast<int>(k_count) + 4;

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t begin, std::size_t end) {
        RowWork work(x.cols());
        std::vector<std::uint8_t> z_row(static_cast<std::size_t>(k_count));
        for (std::size_t ii = begin; ii < end; ++ii) {
            const auto i = static_cast<Eigen::Index>(ii);
            const auto x_row = x.row(i);
            for (Eigen::Index k = 0; k < k_count; ++k) z_row[static_cast<std::size_t>(k)] = z(i, k);
            double current = work.rebuild(t, x_row, z_row);
            work.compute_ratios(t, x_row);
            for (int sweep = 0; sweep < max_sweeps; ++sweep) {
                bool improved = false;
                for (Eigen::Index k = 0; k < k_count; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    const bool on = z_row[kk] != 0;
                    const double slack = 1e-12 * std::max(1.0, std::abs(current));
                    if (!(work.flip_delta(t, x_row, k, on) > slack)) continue;
                    // Confirm with the exact objective before committing.
                    z_row[kk] = on ? 0 : 1;
                    const double candidate = work.rebuild(t, x_row, z_row);
                    if (candidate > current + slack) {
                        current = candidate;
                        ++row_flips[ii];
                        improved = true;
                    } else {
                        z_row[kk] = on ? 1 : 0;
                        current = work.rebuild(t, x_row, z_row);
                    }
                    work.compute_ratios(t, x_row);
                }
                if (!improved) break;
            }
            for (Eigen::Index k = 0; k < k_count; ++k) z(i, k) = z_row[static_cast<std::size_t>(k)];
            row_values[ii] = current;
        }
    });

    double total = 0.0;
    for (double v : row_values) total += v;
    for (auto f : row_flips) stats.flips += f;
    state.z = BinaryMatrix(std::move(z));
    return t.temperature * total;
}

FitState step_with_stats(const BinaryMatrix& x, const FitState& state, StepStats& stats, unsigned threads) {
    check_shapes(x, state.z, state.beta);
    if (!(state.temperature > 0.0)) throw std::invalid_argument("em_step: temperature must be positive");
    FitState next = state;
    update_parameters(x, state, next, stats, threads);
    next.log_likelihood = update_assignments(x, next, stats, threads);
    return next;
}

/// Maximum-likelihood eps and r at unit temperature for fixed z and
/// binarized patterns, i.e. the residual model of z (x) u.
void refit_noise(const BinaryMatrix& x, FitState& state) {
    const Eigen::Index n = x.rows();
    const Eigen::Index dim = x.cols();
    const BinaryMatrix disagree = BinaryMatrix::from_expression(
        x.cast<int>() - boolean_product(state.z, binarize(state.beta)).cast<int>());
    const double entries = static_cast<double>(n * dim);
    const double ones = static_cast<double>(x.bits().cast<std::int64_t>().sum());
    const double miss_ones = static_cast<double>((disagree.bits().array() > 0 && x.bits().array() > 0).count());
    const double miss_zeros = static_cast<double>((disagree.bits().array() > 0 && x.bits().array() == 0).count());
    const double hit_ones = ones - miss_ones;
    const double hit_zeros = entries - ones - miss_zeros;
    // Disagreeing entries are noise for sure; agreeing ones with posterior
    // eps p_N / (eps p_N + 1 - eps).
    for (int iter = 0; iter < 10000; ++iter) {
        const double eps = state.epsilon;
        const double r = state.r;
        const double rho1 = eps * r / (eps * r + 1.0 - eps);
        const double rho0 = eps * (1.0 - r) / (eps * (1.0 - r) + 1.0 - eps);
        const double noise_ones = miss_ones + hit_ones * rho1;
        const double noise_total = noise_ones + miss_zeros + hit_zeros * rho0;
        const double next_eps = clamp_noise(noise_total / entries);
        const double next_r = noise_total > 0.0 ? clamp_noise(noise_ones / noise_total) : r;
        const double change = std::max(std::abs(next_eps - eps), std::abs(next_r - r));
        state.epsilon = next_eps;
        state.r = next_r;
        if (change < 1e-14) break;
    }
}

}  // namespace

BinaryMatrix boolean_product(const BinaryMatrix& z, const BinaryMatrix& u) {
    if (z.cols() != u.rows()) {
        throw DimensionError("boolean_product: inner dimensions " + std::to_string(z.cols()) + " and " +
                             std::to_string(u.rows()) + " differ");
    }
    return BinaryMatrix::from_expression(z.cast<int>() * u.cast<int>());
}

double log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const Eigen::MatrixXd& beta, double r,
                      double epsilon) {
    check_shapes(x, z, beta);
    return total_tempered(x, z, make_tables(beta, r, epsilon, 1.0));
}

double log_likelihood(const BinaryMatrix& x, const FitState& state) {
    return log_likelihood(x, state.z, state.beta, state.r, state.epsilon);
}

double tempered_log_likelihood(const BinaryMatrix& x, const FitState& state) {
    check_shapes(x, state.z, state.beta);
    return total_tempered(x, state.z, make_tables(state.beta, state.r, state.epsilon, state.temperature));
}

FitState em_step(const BinaryMatrix& x, const FitState& state, unsigned threads) {
    StepStats stats;
    return step_with_stats(x, state, stats, threads);
}

FitState initial_state(const BinaryMatrix& x, int K, std::uint64_t seed, double temperature) {
    if (K < 1) throw ConfigError("K must be at least 1");
    Rng rng(seed);
    FitState s;
    s.temperature = temperature;
    s.beta.resize(K, x.cols());
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) s.beta(k, d) = 0.4 + 0.2 * uniform01(rng);
    }
    const double density = std::min(0.5, 2.0 / K);
    BitMatrix z(x.rows(), K);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index k = 0; k < K; ++k) z(i, k) = bernoulli(rng, density) ? 1 : 0;
    }
    s.z = BinaryMatrix(std::move(z));
    s.r = 0.5;
    s.epsilon = 0.05;
    s.log_likelihood = tempered_log_likelihood(x, s);
    return s;
}

Factorization fit(const BinaryMatrix& x, int K, const FitConfig& config) {
    config.validate();
    if (x.empty()) throw DimensionError("fit: empty data matrix");
    if (K < 1) throw ConfigError("fit: K must be at least 1");
    if (K > x.cols()) {
        throw ConfigError("fit: K = " + std::to_string(K) + " exceeds the number of permissions D = " +
                          std::to_string(x.cols()));
    }

    FitState state = initial_state(x, K, config.seed, config.initial_temperature);
    double temperature = config.initial_temperature;
    for (;;) {
        StepStats first;
        for (int iter = 0; iter < config.max_inner_iterations; ++iter) {
            StepStats stats;
            FitState next = step_with_stats(x, state, stats, config.threads);
            const double change =
                std::abs(next.log_likelihood - state.log_likelihood) / std::max(1.0, std::abs(state.log_likelihood));
            if (iter == 0) first = stats;
            state = std::move(next);
            if (change < config.tolerance) break;
        }
        if (temperature <= config.final_temperature) break;
        if (temperature <= 1.0 && first.flips == 0 && first.max_parameter_change < config.parameter_tolerance) break;
        temperature = std::max(temperature * config.cooling_factor, config.final_temperature);
        state.temperature = temperature;
        state.log_likelihood = tempered_log_likelihood(x, state);
    }

    refit_noise(x, state);

    // Unused patterns carry no evidence; report them as empty.
    const Eigen::VectorXi counts = state.z.col_counts();
    for (Eigen::Index k = 0; k < K; ++k) {
        if (counts(k) == 0) state.beta.row(k).setOnes();
    }

    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return counts(a) > counts(b); });

    Factorization out;
    out.beta.resize(K, x.cols());
    for (Eigen::Index k = 0; k < K; ++k) out.beta.row(k) = state.beta.row(order[static_cast<std::size_t>(k)]);
    out.z = state.z.permute_cols(order);
    out.u = binarize(out.beta);
    out.r = state.r;
    out.epsilon = state.epsilon;
    out.seed = config.seed;
    out.log_likelihood = log_likelihood(x, out.z, out.beta, out.r, out.epsilon);
    if (!std::isfinite(out.log_likelihood)) throw NumericError("fit: final log-likelihood is not finite");
    return out;
}

double assignment_log_likelihood(std::span<const std::uint8_t> x_row, std::span<const std::uint8_t> z_row,
                                 const BinaryMatrix& u, double r, double epsilon) {
    if (static_cast<Eigen::Index>(x_row.size()) != u.cols() || static_cast<Eigen::Index>(z_row.size()) != u.rows()) {
        throw DimensionError("assignment_log_likelihood: dimension mismatch");
    }
    const double eps = clamp_noise(epsilon);
    const double rr = clamp_noise(r);
    double acc = 0.0;
    for (std::size_t d = 0; d < x_row.size(); ++d) {
        bool covered = false;
        for (std::size_t k = 0; k < z_row.size() && !covered; ++k) {
            covered = z_row[k] && u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
        }
        const bool xi = x_row[d] != 0;
        const double noise = eps * (xi ? rr : 1.0 - rr);
        acc += std::log(noise + (covered == xi ? 1.0 - eps : 0.0));
    }
    return acc;
}

std::vector<std::uint8_t> assign_patterns(std::span<const std::uint8_t> x_row, const BinaryMatrix& u, double r,
                                          double epsilon) {
    if (static_cast<Eigen::Index>(x_row.size()) != u.cols()) {
        throw DimensionError("assign_patterns: row length != pattern width");
    }
    const double eps = clamp_noise(epsilon);
    const double rr = clamp_noise(r);
    // Per-entry log-probabilities for agreeing / disagreeing with the cover.
    const double agree1 = std::log(eps * rr + 1.0 - eps);
    const double miss1 = std::log(eps * rr);
    const double agree0 = std::log(eps * (1.0 - rr) + 1.0 - eps);
    const double miss0 = std::log(eps * (1.0 - rr));
    const double gain_cover1 = agree1 - miss1;  // > 0
    const double gain_cover0 = miss0 - agree0;  // < 0

    const Eigen::Index k_count = u.rows();
    const Eigen::Index dim = u.cols();
    std::vector<std::uint8_t> z(static_cast<std::size_t>(k_count), 0);
    std::vector<int> cover(static_cast<std::size_t>(dim), 0);

    auto delta_add = [&](Eigen::Index k) {
        double g = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (u(k, d) && cover[static_cast<std::size_t>(d)] == 0) g += x_row[static_cast<std::size_t>(d)] ? gain_cover1 : gain_cover0;
        }
        return g;
    };
    auto delta_remove = [&](Eigen::Index k) {
        double g = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (u(k, d) && cover[static_cast<std::size_t>(d)] == 1) g -= x_row[static_cast<std::size_t>(d)] ? gain_cover1 : gain_cover0;
        }
        return g;
    };
    auto toggle = [&](Eigen::Index k, int step) {
        z[static_cast<std::size_t>(k)] = step > 0 ? 1 : 0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (u(k, d)) cover[static_cast<std::size_t>(d)] += step;
        }
    };

    for (;;) {
        Eigen::Index best = -1;
        double best_gain = 0.0;
        for (Eigen::Index k = 0; k < k_count; ++k) {
            if (z[static_cast<std::size_t>(k)]) continue;
            const double g = delta_add(k);
            if (g > best_gain) {
                best_gain = g;
                best = k;
            }
        }
        if (best < 0) break;
        toggle(best, +1);
    }
    for (;;) {
        Eigen::Index best = -1;
        double best_gain = 0.0;
        for (Eigen::Index k = 0; k < k_count; ++k) {
            if (!z[static_cast<std::size_t>(k)]) continue;
            const double g = delta_remove(k);
            if (g > best_gain) {
                best_gain = g;
                best = k;
            }
        }
        if (best < 0) break;
        toggle(best, -1);
    }
    return z;
}

BinaryMatrix assign_patterns(const BinaryMatrix& x, const BinaryMatrix& u, double r, double epsilon,
                             unsigned threads) {
    if (x.cols() != u.cols()) throw DimensionError("assign_patterns: x columns != u columns");
    BitMatrix z(x.rows(), u.rows());
    parallel_for(static_cast<std::size_t>(x.rows()), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t ii = begin; ii < end; ++ii) {
            const auto i = static_cast<Eigen::Index>(ii);
            const auto row = assign_patterns(x.row(i), u, r, epsilon);
            for (Eigen::Index k = 0; k < u.rows(); ++k) z(i, k) = row[static_cast<std::size_t>(k)];
        }
    });
    return BinaryMatrix(std::move(z), x.row_labels(), {});
}

}  // namespace prpmine
