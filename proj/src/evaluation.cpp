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

#include "prpmine/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "prpmine/bmf.hpp"

namespace prpmine {

namespace {

std::vector<double> fraction_above(const Eigen::VectorXi& counts, int max_t) {
    std::vector<double> out(static_cast<std::size_t>(max_t) + 1, 0.0);
    if (counts.size() == 0) return out;
    for (int t = 0; t <= max_t; ++t) {
        out[static_cast<std::size_t>(t)] =
            static_cast<double>((counts.array() > t).count()) / static_cast<double>(counts.size());
    }
    return out;
}

}  // namespace

ErrorRates error_rates(const BinaryMatrix& x, const BinaryMatrix& reconstruction) {
    if (x.rows() != reconstruction.rows() || x.cols() != reconstruction.cols()) {
        throw DimensionError("error_rates: x and reconstruction differ in shape");
    }
    const Eigen::ArrayXXi diff = x.cast<int>().array() - reconstruction.cast<int>().array();
    ErrorRates e;
    e.fn = (diff == 1).cast<int>().rowwise().sum().matrix();
    e.fp = (diff == -1).cast<int>().rowwise().sum().matrix();
    if (x.rows() > 0) {
        e.mean_fn = e.fn.cast<double>().mean();
        e.mean_fp = e.fp.cast<double>().mean();
    }
    const int max_t = x.rows() > 0 ? std::max(e.fn.maxCoeff(), e.fp.maxCoeff()) : 0;
    e.fraction_fn_above = fraction_above(e.fn, max_t);
    e.fraction_fp_above = fraction_above(e.fp, max_t);
    return e;
}

ErrorRates error_rates(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u) {
    if (z.rows() != x.rows() || u.cols() != x.cols() || z.cols() != u.rows()) {
        throw DimensionError("error_rates: x, z, u dimensions disagree");
    }
    return error_rates(x, boolean_product(z, u));
}

PcpMatrix pcp_matrix(const BinaryMatrix& x) {
    const Eigen::MatrixXd xd = x.cast<double>();
    const Eigen::MatrixXd co = xd.transpose() * xd;
    const Eigen::VectorXd counts = co.diagonal();
    PcpMatrix out;
    out.p = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
        if (counts(t) > 0.0) {
            out.p.col(t) = co.col(t) / counts(t);
        } else {
            out.undefined_columns.push_back(static_cast<int>(t));
        }
    }
    return out;
}

AveragePcp average_pcp(const PcpMatrix& pcp) {
    const Eigen::Index dim = pcp.p.rows();
    std::vector<char> defined(static_cast<std::size_t>(dim), 1);
    for (int t : pcp.undefined_columns) defined[static_cast<std::size_t>(t)] = 0;
    AveragePcp out;
    double sum = 0.0;
    for (Eigen::Index s = 0; s < dim; ++s) {
        for (Eigen::Index t = 0; t < dim; ++t) {
            if (s == t || !defined[static_cast<std::size_t>(s)] || !defined[static_cast<std::size_t>(t)]) continue;
            sum += pcp.p(s, t);
            ++out.pairs;
        }
    }
    out.degenerate = out.pairs == 0;
    out.value = out.degenerate ? 0.0 : sum / static_cast<double>(out.pairs);
    return out;
}

PatternFrequencies pattern_frequencies(const BinaryMatrix& z) {
    PatternFrequencies out;
    const Eigen::VectorXd freq =
        z.rows() > 0 ? Eigen::VectorXd(z.cast<double>().colwise().mean().transpose()) : Eigen::VectorXd::Zero(z.cols());
    out.order.resize(static_cast<std::size_t>(z.cols()));
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) { return freq(a) > freq(b); });
    out.frequency.resize(z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) out.frequency(j) = freq(out.order[static_cast<std::size_t>(j)]);
    return out;
}

double category_divergence(const BinaryMatrix& z, std::span<const std::string> categories, Eigen::Index k,
                           double smoothing) {
    if (static_cast<Eigen::Index>(categories.size()) != z.rows()) {
        throw DimensionError("category_divergence: need one category per application");
    }
    if (k < 0 || k >= z.cols()) throw DimensionError("category_divergence: pattern index out of range");
    if (!(smoothing >= 0.0)) throw ConfigError("category_divergence: smoothing must be non-negative");

    std::map<std::string, std::pair<double, double>> counts;  // category -> (all, pattern k)
    double assigned = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        auto& c = counts[categories[static_cast<std::size_t>(i)]];
        c.first += 1.0;
        if (z(i, k)) {
            c.second += 1.0;
            assigned += 1.0;
        }
    }
    if (assigned == 0.0) {
        throw UndefinedDivergence("category_divergence: pattern " + std::to_string(k) + " is assigned to no application");
    }
    const double categories_count = static_cast<double>(counts.size());
    const double total_g = static_cast<double>(z.rows()) + smoothing * categories_count;
    const double total_k = assigned + smoothing * categories_count;
    double kl = 0.0;
    for (const auto& [name, c] : counts) {
        const double pg = (c.first + smoothing) / total_g;
        const double pk = (c.second + smoothing) / total_k;
        if (pg > 0.0) kl += pg * std::log2(pg / pk);
    }
    return std::max(kl, 0.0);
}

EvaluationReport evaluate(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u,
                          std::span<const std::string> categories, double smoothing) {
    EvaluationReport report;
    report.errors = error_rates(x, z, u);
    report.pcp = pcp_matrix(x);
    report.average = average_pcp(report.pcp);
    const PatternFrequencies freq = pattern_frequencies(z);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        PatternSummary p;
        p.pattern = freq.order[static_cast<std::size_t>(j)];
        p.frequency = freq.frequency(j);
        if (!categories.empty() && p.frequency > 0.0) p.kl_bits = category_divergence(z, categories, p.pattern, smoothing);
        for (Eigen::Index d = 0; d < u.cols(); ++d) {
            if (u(p.pattern, d)) p.members.push_back(static_cast<int>(d));
        }
        report.patterns.push_back(std::move(p));
    }
    return report;
}

}  // namespace prpmine
