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

namespace prpmine {

using CostMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Assignment {
    std::vector<int> column_of_row;
    std::int64_t cost = 0;
};

/// Minimum-cost perfect matching of a square cost matrix (Hungarian method, O(n^3)).
Assignment solve_assignment(const CostMatrix& cost);

/// Among all minimum-cost matchings, the lexicographically smallest
/// column_of_row vector.
Assignment lexicographic_assignment(const CostMatrix& cost);

}  // namespace prpmine
