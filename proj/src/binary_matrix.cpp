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

#include "prpmine/binary_matrix.hpp"

#include <string>

namespace prpmine {

BinaryMatrix::BinaryMatrix(BitMatrix bits, std::vector<std::string> row_labels,
                           std::vector<std::string> col_labels)
    : bits_(std::move(bits)), row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)) {
    if ((bits_.array() > 1).any()) {
        throw std::invalid_argument("BinaryMatrix entries must be 0 or 1");
    }
    if (!row_labels_.empty() && static_cast<Eigen::Index>(row_labels_.size()) != bits_.rows()) {
        throw DimensionError("row label count " + std::to_string(row_labels_.size()) +
                             " != rows " + std::to_string(bits_.rows()));
    }
    if (!col_labels_.empty() && static_cast<Eigen::Index>(col_labels_.size()) != bits_.cols()) {
        throw DimensionError("column label count " + std::to_string(col_labels_.size()) +
                             " != cols " + std::to_string(bits_.cols()));
    }
}

BinaryMatrix BinaryMatrix::zeros(Eigen::Index rows, Eigen::Index cols) {
    return BinaryMatrix(BitMatrix::Zero(rows, cols));
}

bool BinaryMatrix::at(Eigen::Index i, Eigen::Index d) const {
    if (i < 0 || i >= rows() || d < 0 || d >= cols()) {
        throw std::out_of_range("BinaryMatrix index out of range");
    }
    return bits_(i, d) != 0;
}

std::vector<bool> BinaryMatrix::row_vector(Eigen::Index i) const {
    std::vector<bool> out(static_cast<std::size_t>(cols()));
    for (Eigen::Index d = 0; d < cols(); ++d) out[static_cast<std::size_t>(d)] = bits_(i, d) != 0;
    return out;
}

Eigen::VectorXi BinaryMatrix::col_counts() const {
    return bits_.cast<int>().colwise().sum().transpose();
}

Eigen::VectorXi BinaryMatrix::row_counts() const {
    return bits_.cast<int>().rowwise().sum();
}

BinaryMatrix BinaryMatrix::select_rows(std::span<const Eigen::Index> indices) const {
    BitMatrix out(static_cast<Eigen::Index>(indices.size()), cols());
    std::vector<std::string> labels;
    if (!row_labels_.empty()) labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const Eigen::Index src = indices[r];
        if (src < 0 || src >= rows()) throw std::out_of_range("select_rows index out of range");
        out.row(static_cast<Eigen::Index>(r)) = bits_.row(src);
        if (!row_labels_.empty()) labels.push_back(row_labels_[static_cast<std::size_t>(src)]);
    }
    return BinaryMatrix(std::move(out), std::move(labels), col_labels_);
}

BinaryMatrix BinaryMatrix::permute_cols(std::span<const int> order) const {
    if (static_cast<Eigen::Index>(order.size()) != cols()) {
        throw DimensionError("permute_cols: order length != cols");
    }
    BitMatrix out(rows(), cols());
    std::vector<std::string> labels;
    if (!col_labels_.empty()) labels.reserve(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = bits_.col(order[j]);
        if (!col_labels_.empty()) labels.push_back(col_labels_[static_cast<std::size_t>(order[j])]);
    }
    return BinaryMatrix(std::move(out), row_labels_, std::move(labels));
}

BinaryMatrix BinaryMatrix::with_labels(std::vector<std::string> row_labels,
                                       std::vector<std::string> col_labels) const {
    return BinaryMatrix(bits_, std::move(row_labels), std::move(col_labels));
}

BinaryMatrix matrix_from_rows(const std::vector<std::vector<bool>>& rows) {
    if (rows.empty()) throw DimensionError("matrix_from_rows: no rows");
    const std::size_t width = rows.front().size();
    BitMatrix bits(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) {
            throw DimensionError("matrix_from_rows: row " + std::to_string(i) + " has length " +
                                 std::to_string(rows[i].size()) + ", expected " + std::to_string(width));
        }
        for (std::size_t d = 0; d < width; ++d) {
            bits(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d] ? 1 : 0;
        }
    }
    return BinaryMatrix(std::move(bits));
}

BinaryMatrix matrix_from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    std::vector<std::vector<bool>> v;
    for (const auto& r : rows) {
        std::vector<bool> row;
        for (int e : r) {
            if (e != 0 && e != 1) throw std::invalid_argument("matrix_from_rows: entries must be 0 or 1");
            row.push_back(e == 1);
        }
        v.push_back(std::move(row));
    }
    return matrix_from_rows(v);
}

std::int64_t hamming_distance(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hamming_distance: shapes differ");
    }
    return (a.bits().array() != b.bits().array()).cast<std::int64_t>().sum();
}

int row_hamming(const BinaryMatrix& a, Eigen::Index i, const BinaryMatrix& b, Eigen::Index j) {
    if (a.cols() != b.cols()) throw DimensionError("row_hamming: column counts differ");
    return static_cast<int>((a.bits().row(i).array() != b.bits().row(j).array()).count());
}

}  // namespace prpmine
