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

#include "prpmine/assignment.hpp"

#include <limits>

#include "prpmine/binary_matrix.hpp"

namespace prpmine {

namespace {

// Shortest augmenting path with row/column potentials; arrays are 1-based
// with index 0 as the virtual source column.
template <typename CostAt>
std::vector<int> hungarian(int n, CostAt&& cost_at) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> row_pot(n + 1, 0), col_pot(n + 1, 0), min_slack(n + 1);
    std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
    std::vector<char> visited(n + 1);
    for (int i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        int col = 0;
        std::fill(min_slack.begin(), min_slack.end(), kInf);
        std::fill(visited.begin(), visited.end(), 0);
        do {
            visited[col] = 1;
            const int row = row_of_col[col];
            std::int64_t delta = kInf;
            int next = 0;
            for (int j = 1; j <= n; ++j) {
                if (visited[j]) continue;
                const std::int64_t slack = cost_at(row - 1, j - 1) - row_pot[row] - col_pot[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    way[j] = col;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    next = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (visited[j]) {
                    row_pot[row_of_col[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            col = next;
        } while (row_of_col[col] != 0);
        do {
            const int prev = way[col];
            row_of_col[col] = row_of_col[prev];
            col = prev;
        } while (col != 0);
    }
    std::vector<int> column_of_row(n);
    for (int j = 1; j <= n; ++j) column_of_row[row_of_col[j] - 1] = j - 1;
    return column_of_row;
}

void require_square(const CostMatrix& cost) {
    if (cost.rows() != cost.cols()) throw DimensionError("assignment: cost matrix must be square");
}

/// Optimal cost on the rows from `first_row` on and the columns not yet used.
std::int64_t residual_cost(const CostMatrix& cost, Eigen::Index first_row, const std::vector<char>& used) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
        if (!used[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    const int m = static_cast<int>(cols.size());
    if (m == 0) return 0;
    const auto match = hungarian(m, [&](int i, int j) { return cost(first_row + i, cols[static_cast<std::size_t>(j)]); });
    std::int64_t total = 0;
    for (int i = 0; i < m; ++i) total += cost(first_row + i, cols[static_cast<std::size_t>(match[i])]);
    return total;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
    require_square(cost);
    Assignment out;
    const int n = static_cast<int>(cost.rows());
    out.column_of_row = hungarian(n, [&](int i, int j) { return cost(i, j); });
    for (int i = 0; i < n; ++i) out.cost += cost(i, out.column_of_row[static_cast<std::size_t>(i)]);
    return out;
}

Assignment lexicographic_assignment(const CostMatrix& cost) {
    const Assignment best = solve_assignment(cost);
    const Eigen::Index n = cost.rows();
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    Assignment out;
    out.column_of_row.assign(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = 1;
            if (out.cost + cost(i, j) + residual_cost(cost, i + 1, used) == best.cost) {
                out.column_of_row[static_cast<std::size_t>(i)] = static_cast<int>(j);
                out.cost += cost(i, j);
                break;
            }
            used[static_cast<std::size_t>(j)] = 0;
        }
    }
    return out;
}

}  // namespace prpmine
