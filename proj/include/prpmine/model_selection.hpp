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
#include <span>
#include <utility>
#include <vector>

#include "prpmine/binary_matrix.hpp"
#include "prpmine/factorization.hpp"

namespace prpmine {

/// Seeded row permutation cut into two halves; the first half receives the
/// extra row when N is odd.
std::pair<BinaryMatrix, BinaryMatrix> split_dataset(const BinaryMatrix& x, std::uint64_t seed);

/// Permutation pi (pattern k of u1 corresponds to pattern pi[k] of u2) minimizing
/// sum_k hamming(u1.row(k), u2.row(pi[k])). Ties go to the lexicographically
/// smallest pi.
std::vector<int> match_patterns(const BinaryMatrix& u1, const BinaryMatrix& u2);

/// sum_k hamming(u1.row(k), u2.row(perm[k])).
std::int64_t matching_cost(const BinaryMatrix& u1, const BinaryMatrix& u2, std::span<const int> perm);

enum class MatchMode {
    pattern_hamming,  ///< permutation from match_patterns on the pattern matrices
    exhaustive,       ///< permutation minimizing the row disagreement itself (K <= 8)
};

inline constexpr int kMaxExhaustiveK = 8;

/// 2^K/(2^K-1) times the fraction of rows i where the relabeled transferred
/// assignment (bit k moved to position perm[k]) differs from fitted row i.
double instability_score(const BinaryMatrix& transferred, const BinaryMatrix& fitted, std::span<const int> perm);

/// instability_score minimized over all K! relabelings. Requires K <= kMaxExhaustiveK.
double exhaustive_instability_score(const BinaryMatrix& transferred, const BinaryMatrix& fitted);

struct InstabilityRecord {
    int K = 0;
    std::vector<double> s;  ///< one value per repetition
    std::vector<std::uint64_t> seeds;
    double median_s = 0.0;
    double std_s = 0.0;  ///< sample standard deviation, 0 for a single repetition
};

struct InstabilityReport {
    std::vector<InstabilityRecord> records;
    int selected_k = 0;
};

/// Instability of one split: fit both halves, transfer the first model to the
/// second half with assign_patterns, align labels and score the disagreement.
double split_instability(const BinaryMatrix& x, int K, std::uint64_t seed, const FitConfig& config,
                         MatchMode mode = MatchMode::pattern_hamming);

/// Repetition i uses seed config.seed + i for the split and both fits.
InstabilityRecord instability(const BinaryMatrix& x, int K, int repetitions, const FitConfig& config,
                              MatchMode mode = MatchMode::pattern_hamming);

/// K with the smallest median instability; ties go to the smaller K.
int choose_k(std::span<const InstabilityRecord> records);

/// instability for every K in k_range, then choose_k. Independent (K, repetition)
/// runs are spread over config.threads workers; each fit then runs single-threaded.
InstabilityReport select_k(const BinaryMatrix& x, std::span<const int> k_range, int repetitions,
                           const FitConfig& config, MatchMode mode = MatchMode::pattern_hamming);

}  // namespace prpmine
