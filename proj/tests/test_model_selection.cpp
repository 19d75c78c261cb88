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

#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "prpmine/bmf.hpp"
#include "prpmine/model_selection.hpp"
#include "prpmine/simulator.hpp"

using namespace prpmine;

namespace {

BinaryMatrix labelled_rows(Eigen::Index n) {
    BitMatrix b = BitMatrix::Zero(n, 1);
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return BinaryMatrix(b, labels, {});
}

BinaryMatrix relabel(const BinaryMatrix& z, const std::vector<int>& perm) {
    // column perm[k] of the result is column k of z
    BitMatrix out(z.rows(), z.cols());
    for (Eigen::Index k = 0; k < z.cols(); ++k) out.col(perm[std::size_t(k)]) = z.bits().col(k);
    return BinaryMatrix(out);
}

}  // namespace

TEST_SUITE("model_selection") {

TEST_CASE("split_dataset sizes, coverage and determinism") {
    const auto [a, b] = split_dataset(labelled_rows(2), 1);
    CHECK(a.rows() == 1);
    CHECK(b.rows() == 1);

    const BinaryMatrix x = labelled_rows(101);
    const auto [h1, h2] = split_dataset(x, 5);
    CHECK(h1.rows() == 51);
    CHECK(h2.rows() == 50);
    std::set<std::string> seen(h1.row_labels().begin(), h1.row_labels().end());
    seen.insert(h2.row_labels().begin(), h2.row_labels().end());
    CHECK(seen.size() == 101);

    const auto [g1, g2] = split_dataset(x, 5);
    CHECK(g1.row_labels() == h1.row_labels());
    CHECK(g2.row_labels() == h2.row_labels());
    CHECK_THROWS_AS(split_dataset(labelled_rows(1), 0), DimensionError);
}

TEST_CASE("match_patterns identity and reversal") {
    Rng rng(1);
    BitMatrix b = oracle::random_matrix(rng, 5, 12, 0.4).bits();
    b.leftCols(5).setIdentity();  // distinct rows
    const BinaryMatrix u(b);
    CHECK(match_patterns(u, u) == std::vector<int>{0, 1, 2, 3, 4});
    const BinaryMatrix reversed = u.select_rows(std::vector<Eigen::Index>{4, 3, 2, 1, 0});
    CHECK(match_patterns(u, reversed) == std::vector<int>{4, 3, 2, 1, 0});
    CHECK_THROWS_AS(match_patterns(u, oracle::random_matrix(rng, 4, 12, 0.4)), DimensionError);
}

TEST_CASE("match_patterns cost equals the exhaustive minimum") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index k = 1 + uniform_index(rng, 8);
        const BinaryMatrix u1 = oracle::random_matrix(rng, k, 10, 0.3);
        const BinaryMatrix u2 = oracle::random_matrix(rng, k, 10, 0.3);
        const auto perm = match_patterns(u1, u2);
        CHECK(matching_cost(u1, u2, perm) == oracle::min_perm_cost(u1, u2));
    }
}

TEST_CASE("instability_score of identical assignments is zero") {
    Rng rng(3);
    const BinaryMatrix z = oracle::random_matrix(rng, 50, 4, 0.5);
    const std::vector<int> id{0, 1, 2, 3};
    CHECK(instability_score(z, z, id) == 0.0);
    CHECK(exhaustive_instability_score(z, z) == 0.0);
}

TEST_CASE("instability is invariant under relabeling") {
    Rng rng(4);
    const BinaryMatrix z = oracle::random_matrix(rng, 60, 4, 0.5);
    const std::vector<int> perm{2, 0, 3, 1};
    const BinaryMatrix shuffled = relabel(z, perm);
    CHECK(instability_score(z, shuffled, perm) == 0.0);
    CHECK(exhaustive_instability_score(z, shuffled) == 0.0);
}

TEST_CASE("normalization and bounds") {
    // Every row differs: s = 2^K / (2^K - 1).
    const BinaryMatrix zeros = BinaryMatrix::zeros(10, 3);
    const BinaryMatrix ones = BinaryMatrix::from_expression(Eigen::MatrixXi::Ones(10, 3));
    const std::vector<int> id{0, 1, 2};
    CHECK(instability_score(zeros, ones, id) == doctest::Approx(8.0 / 7.0));
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index k = 1 + uniform_index(rng, 5);
        const BinaryMatrix a = oracle::random_matrix(rng, 30, k, 0.5);
        const BinaryMatrix b = oracle::random_matrix(rng, 30, k, 0.5);
        const double s = exhaustive_instability_score(a, b);
        const double bound = std::ldexp(1.0, int(k)) / (std::ldexp(1.0, int(k)) - 1.0);
        CHECK(s >= 0.0);
        CHECK(s <= bound + 1e-12);
        CHECK(s == doctest::Approx(bound * double(oracle::min_row_disagreement(a, b)) / 30.0));
        std::vector<int> id_k(static_cast<std::size_t>(k));
        std::iota(id_k.begin(), id_k.end(), 0);
        CHECK(s <= instability_score(a, b, id_k) + 1e-12);
    }
}

TEST_CASE("random assignments are instability-neutral") {
    Rng rng(6);
    for (int k : {2, 5}) {
        const BinaryMatrix a = oracle::random_matrix(rng, 4000, k, 0.5);
        const BinaryMatrix b = oracle::random_matrix(rng, 4000, k, 0.5);
        std::vector<int> id(static_cast<std::size_t>(k));
        std::iota(id.begin(), id.end(), 0);
        CHECK(instability_score(a, b, id) == doctest::Approx(1.0).epsilon(0.05));
    }
    CHECK_THROWS_AS(exhaustive_instability_score(BinaryMatrix::zeros(3, 9), BinaryMatrix::zeros(3, 9)), ConfigError);
}

TEST_CASE("choose_k takes the minimum median with ties to the smaller K") {
    std::vector<InstabilityRecord> recs(3);
    recs[0].K = 4;
    recs[0].median_s = 0.2;
    recs[1].K = 2;
    recs[1].median_s = 0.2;
    recs[2].K = 3;
    recs[2].median_s = 0.5;
    CHECK(choose_k(recs) == 2);
    recs[2].median_s = 0.1;
    CHECK(choose_k(recs) == 3);
    CHECK_THROWS_AS(choose_k(std::vector<InstabilityRecord>{}), ConfigError);
}

TEST_CASE("instability and select_k on a small planted model") {
    PlantConfig pc;
    pc.n = 300;
    pc.d = 16;
    pc.k = 2;
    pc.pattern_density = 0.3;
    pc.seed = 8;
    const PlantedModel m = plant_factorization(pc);
    FitConfig fc;
    fc.seed = 3;
    const InstabilityRecord rec = instability(m.x, 2, 2, fc);
    CHECK(rec.K == 2);
    CHECK(rec.s.size() == 2);
    CHECK(rec.seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(rec.median_s == doctest::Approx(0.5 * (rec.s[0] + rec.s[1])));
    for (double s : rec.s) CHECK(s >= 0.0);

    const std::vector<int> single{2};
    const InstabilityReport one = select_k(m.x, single, 1, fc);
    CHECK(one.records.size() == 1);
    CHECK(one.selected_k == 2);
    CHECK_THROWS_AS(select_k(m.x, std::vector<int>{}, 1, fc), ConfigError);
    CHECK_THROWS_AS(select_k(m.x, std::vector<int>{17}, 1, fc), ConfigError);

    // The surrogate permutation can only do as well as the exhaustive one.
    const double exact = split_instability(m.x, 2, 11, fc, MatchMode::exhaustive);
    const double surrogate = split_instability(m.x, 2, 11, fc, MatchMode::pattern_hamming);
    CHECK(exact <= surrogate + 1e-12);
}

TEST_CASE("select_k results do not depend on the worker count") {
    PlantConfig pc;
    pc.n = 120;
    pc.d = 10;
    pc.k = 2;
    pc.seed = 9;
    const PlantedModel m = plant_factorization(pc);
    FitConfig fc;
    const std::vector<int> range{1, 2};
    const InstabilityReport a = select_k(m.x, range, 2, fc);
    fc.threads = 3;
    const InstabilityReport b = select_k(m.x, range, 2, fc);
    for (std::size_t j = 0; j < range.size(); ++j) CHECK(a.records[j].s == b.records[j].s);
    CHECK(a.selected_k == b.selected_k);
}

}
