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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace prpmine {

/// Thrown when operand shapes do not agree or input is ragged/empty.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown for invalid model or run configuration (K out of range, bad thresholds).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an optimization ends in a non-finite state.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major 0/1 storage, one byte per entry.
using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable N x D Boolean matrix with optional row and column labels.
///
/// Used for the observations x (apps x permissions), the assignments z
/// (apps x patterns) and the patterns u (patterns x permissions).
class BinaryMatrix {
public:
    BinaryMatrix() = default;

    /// Takes ownership of `bits`; every entry must be 0 or 1.
    explicit BinaryMatrix(BitMatrix bits,
                          std::vector<std::string> row_labels = {},
                          std::vector<std::string> col_labels = {});

    static BinaryMatrix zeros(Eigen::Index rows, Eigen::Index cols);

    /// Entry-wise `expr != 0` of any Eigen expression.
    template <typename Derived>
    static BinaryMatrix from_expression(const Eigen::DenseBase<Derived>& expr) {
        BitMatrix bits = (expr.derived().array() != typename Derived::Scalar(0)).template cast<std::uint8_t>();
        return BinaryMatrix(std::move(bits));
    }

    Eigen::Index rows() const { return bits_.rows(); }
    Eigen::Index cols() const { return bits_.cols(); }
    bool empty() const { return bits_.size() == 0; }

    bool operator()(Eigen::Index i, Eigen::Index d) const { return bits_(i, d) != 0; }
    bool at(Eigen::Index i, Eigen::Index d) const;

    const BitMatrix& bits() const { return bits_; }

    /// Contiguous view of one row.
    std::span<const std::uint8_t> row(Eigen::Index i) const {
        return {bits_.data() + i * bits_.cols(), static_cast<std::size_t>(bits_.cols())};
    }
    std::vector<bool> row_vector(Eigen::Index i) const;

    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    /// Number of ones per column / per row.
    Eigen::VectorXi col_counts() const;
    Eigen::VectorXi row_counts() const;

    /// Integer view for use in Eigen products.
    template <typename Scalar>
    auto cast() const { return bits_.cast<Scalar>(); }

    /// New matrix containing the given rows in the given order (labels follow).
    BinaryMatrix select_rows(std::span<const Eigen::Index> indices) const;
    /// New matrix with columns reordered so that column j of the result is column order[j].
    BinaryMatrix permute_cols(std::span<const int> order) const;

    BinaryMatrix with_labels(std::vector<std::string> row_labels, std::vector<std::string> col_labels) const;

    friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
        return a.bits_.rows() == b.bits_.rows() && a.bits_.cols() == b.bits_.cols() && a.bits_ == b.bits_;
    }

private:
    BitMatrix bits_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

/// Copies a list of equal-length Boolean rows into a matrix.
BinaryMatrix matrix_from_rows(const std::vector<std::vector<bool>>& rows);
BinaryMatrix matrix_from_rows(std::initializer_list<std::initializer_list<int>> rows);

/// Number of positions where `a` and `b` differ.
std::int64_t hamming_distance(const BinaryMatrix& a, const BinaryMatrix& b);

/// Hamming distance between row `i` of `a` and row `j` of `b` (equal column counts).
int row_hamming(const BinaryMatrix& a, Eigen::Index i, const BinaryMatrix& b, Eigen::Index j);

}  // namespace prpmine
