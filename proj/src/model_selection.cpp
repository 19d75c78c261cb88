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

#include "prpmine/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "prpmine/assignment.hpp"
#include "prpmine/bmf.hpp"
#include "prpmine/parallel.hpp"
#include "prpmine/random.hpp"

namespace prpmine {

namespace {

double normalization(Eigen::Index k) {
    const double labels = std::ldexp(1.0, static_cast<int>(k));
    return labels / (labels - 1.0);
}

void require_same_assignment_shape(const BinaryMatrix& transferred, const BinaryMatrix& fitted) {
    if (transferred.rows() != fitted.rows() || transferred.cols() != fitted.cols()) {
        throw DimensionError("instability: assignment matrices differ in shape");
    }
    if (fitted.rows() < 1 || fitted.cols() < 1) throw DimensionError("instability: empty assignments");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double s : v) ss += (s - mean) * (s - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

InstabilityRecord summarize(int K, std::vector<double> s, std::vector<std::uint64_t> seeds) {
    InstabilityRecord rec;
    rec.K = K;
    rec.median_s = median(s);
    rec.std_s = sample_std(s);
    rec.s = std::move(s);
    rec.seeds = std::move(seeds);
    return rec;
}

}  // namespace

std::pair<BinaryMatrix, BinaryMatrix> split_dataset(const BinaryMatrix& x, std::uint64_t seed) {
    if (x.rows() < 2) throw DimensionError("split_dataset: need at least two rows");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(seed);
    shuffle(order, rng);
    const std::size_t first = (order.size() + 1) / 2;
    const std::span<const Eigen::Index> all(order);
    return {x.select_rows(all.first(first)), x.select_rows(all.subspan(first))};
}

std::vector<int> match_patterns(const BinaryMatrix& u1, const BinaryMatrix& u2) {
    if (u1.rows() != u2.rows() || u1.cols() != u2.cols()) throw DimensionError("match_patterns: shape mismatch");
    const Eigen::Index k = u1.rows();
    CostMatrix cost(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) cost(a, b) = row_hamming(u1, a, u2, b);
    }
    return lexicographic_assignment(cost).column_of_row;
}

std::int64_t matching_cost(const BinaryMatrix& u1, const BinaryMatrix& u2, std::span<const int> perm) {
    if (u1.rows() != u2.rows() || u1.cols() != u2.cols()) throw DimensionError("matching_cost: shape mismatch");
    if (static_cast<Eigen::Index>(perm.size()) != u1.rows()) throw DimensionError("matching_cost: bad permutation");
    std::int64_t total = 0;
    for (Eigen::Index k = 0; k < u1.rows(); ++k) total += row_hamming(u1, k, u2, perm[static_cast<std::size_t>(k)]);
    return total;
}

double instability_score(const BinaryMatrix& transferred, const BinaryMatrix& fitted, std::span<const int> perm) {
    require_same_assignment_shape(transferred, fitted);
    const Eigen::Index k_count = fitted.cols();
    if (static_cast<Eigen::Index>(perm.size()) != k_count) throw DimensionError("instability: bad permutation");
    std::int64_t differing = 0;
    for (Eigen::Index i = 0; i < fitted.rows(); ++i) {
        for (Eigen::Index k = 0; k < k_count; ++k) {
            if (transferred(i, k) != fitted(i, perm[static_cast<std::size_t>(k)])) {
                ++differing;
                break;
            }
        }
    }
    return normalization(k_count) * static_cast<double>(differing) / static_cast<double>(fitted.rows());
}

double exhaustive_instability_score(const BinaryMatrix& transferred, const BinaryMatrix& fitted) {
    require_same_assignment_shape(transferred, fitted);
    const Eigen::Index k_count = fitted.cols();
    if (k_count > kMaxExhaustiveK) throw ConfigError("exhaustive instability supports K <= 8 only");

    auto mask = [](const BinaryMatrix& m, Eigen::Index i) {
        unsigned v = 0;
        for (Eigen::Index k = 0; k < m.cols(); ++k) v |= static_cast<unsigned>(m(i, k)) << k;
        return v;
    };
    std::unordered_map<unsigned, std::int64_t> pair_counts;
    for (Eigen::Index i = 0; i < fitted.rows(); ++i) ++pair_counts[(mask(transferred, i) << 8) | mask(fitted, i)];
    std::vector<std::pair<unsigned, std::int64_t>> pairs(pair_counts.begin(), pair_counts.end());

    std::vector<int> perm(static_cast<std::size_t>(k_count));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = fitted.rows();
    do {
        std::int64_t differing = 0;
        for (const auto& [key, count] : pairs) {
            const unsigned a = key >> 8;
            unsigned moved = 0;
            for (Eigen::Index k = 0; k < k_count; ++k) moved |= ((a >> k) & 1u) << perm[static_cast<std::size_t>(k)];
            if (moved != (key & 0xFFu)) differing += count;
        }
        best = std::min(best, differing);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return normalization(k_count) * static_cast<double>(best) / static_cast<double>(fitted.rows());
}

double split_instability(const BinaryMatrix& x, int K, std::uint64_t seed, const FitConfig& config,
                         MatchMode mode) {
    const auto [first, second] = split_dataset(x, seed);
    FitConfig fc = config;
    fc.seed = seed;
    const Factorization f1 = fit(first, K, fc);
    const Factorization f2 = fit(second, K, fc);
    const BinaryMatrix transferred = assign_patterns(second, f1.u, f1.r, f1.epsilon, fc.threads);
    if (mode == MatchMode::exhaustive) return exhaustive_instability_score(transferred, f2.z);
    return instability_score(transferred, f2.z, match_patterns(f1.u, f2.u));
}

InstabilityRecord instability(const BinaryMatrix& x, int K, int repetitions, const FitConfig& config,
                              MatchMode mode) {
    if (repetitions < 1) throw ConfigError("instability: repetitions must be at least 1");
    if (K < 1) throw ConfigError("instability: K must be at least 1");
    std::vector<double> s;
    std::vector<std::uint64_t> seeds;
    for (int rep = 0; rep < repetitions; ++rep) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(rep);
        seeds.push_back(seed);
        s.push_back(split_instability(x, K, seed, config, mode));
    }
    return summarize(K, std::move(s), std::move(seeds));
}

int choose_k(std::span<const InstabilityRecord> records) {
    if (records.empty()) throw ConfigError("choose_k: no instability records");
    const InstabilityRecord* best = &records.front();
    for (const auto& rec : records) {
        if (rec.median_s < best->median_s || (rec.median_s == best->median_s && rec.K < best->K)) best = &rec;
    }
    return best->K;
}

InstabilityReport select_k(const BinaryMatrix& x, std::span<const int> k_range, int repetitions,
                           const FitConfig& config, MatchMode mode) {
    if (k_range.empty()) throw ConfigError("select_k: empty K range");
    if (repetitions < 1) throw ConfigError("select_k: repetitions must be at least 1");
    for (int k : k_range) {
        if (k < 1 || k > x.cols()) throw ConfigError("select_k: K = " + std::to_string(k) + " outside [1, D]");
    }
    config.validate();

    const std::size_t reps = static_cast<std::size_t>(repetitions);
    const std::size_t tasks = k_range.size() * reps;
    std::vector<double> scores(tasks);
    FitConfig inner = config;
    const unsigned workers = std::max(1u, config.threads);
    if (workers > 1) inner.threads = 1;
    parallel_for(tasks, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const int k = k_range[t / reps];
            const std::uint64_t seed = config.seed + t % reps;
            scores[t] = split_instability(x, k, seed, inner, mode);
        }
    });

    InstabilityReport report;
    for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
        std::vector<double> s(scores.begin() + static_cast<std::ptrdiff_t>(ki * reps),
                              scores.begin() + static_cast<std::ptrdiff_t>((ki + 1) * reps));
        std::vector<std::uint64_t> seeds;
        for (std::size_t rep = 0; rep < reps; ++rep) seeds.push_back(config.seed + rep);
        report.records.push_back(summarize(k_range[ki], std::move(s), std::move(seeds)));
    }
    report.selected_k = choose_k(report.records);
    return report;
}

}  // namespace prpmine
