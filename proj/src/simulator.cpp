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

#include "prpmine/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "prpmine/bmf.hpp"
#include "prpmine/random.hpp"

namespace prpmine {

namespace {
void require_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}
}  // namespace

BinaryMatrix simulate_independent(const Eigen::VectorXd& p, Eigen::Index n, std::uint64_t seed) {
    for (Eigen::Index d = 0; d < p.size(); ++d) require_probability(p(d), "marginal probability");
    Rng rng(seed);
    BitMatrix bits(n, p.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index d = 0; d < p.size(); ++d) bits(i, d) = bernoulli(rng, p(d)) ? 1 : 0;
    }
    return BinaryMatrix(std::move(bits));
}

PlantedModel plant_factorization(const PlantConfig& c) {
    require_probability(c.pattern_density, "pattern density");
    require_probability(c.assign_density, "assignment density");
    require_probability(c.epsilon, "epsilon");
    require_probability(c.r, "r");
    if (c.n < 1 || c.d < 1 || c.k < 1) throw DimensionError("plant_factorization: N, D, K must be positive");

    Rng rng(c.seed);
    BitMatrix u(c.k, c.d);
    for (Eigen::Index k = 0; k < c.k; ++k) {
        for (Eigen::Index d = 0; d < c.d; ++d) u(k, d) = bernoulli(rng, c.pattern_density) ? 1 : 0;
    }
    BitMatrix z(c.n, c.k);
    for (Eigen::Index i = 0; i < c.n; ++i) {
        for (Eigen::Index k = 0; k < c.k; ++k) z(i, k) = bernoulli(rng, c.assign_density) ? 1 : 0;
    }
    PlantedModel m{BinaryMatrix{}, BinaryMatrix(std::move(z)), BinaryMatrix(std::move(u))};
    BitMatrix x = boolean_product(m.z, m.u).bits();
    if (c.epsilon > 0.0) {
        for (Eigen::Index i = 0; i < c.n; ++i) {
            for (Eigen::Index d = 0; d < c.d; ++d) {
                if (bernoulli(rng, c.epsilon)) x(i, d) = bernoulli(rng, c.r) ? 1 : 0;
            }
        }
    }
    m.x = BinaryMatrix(std::move(x));
    return m;
}

PcpHistogram pcp_histogram(const Eigen::MatrixXd& pcp_real, const Eigen::MatrixXd& pcp_sim, int bins,
                           double underflow_threshold) {
    if (pcp_real.rows() != pcp_sim.rows() || pcp_real.cols() != pcp_sim.cols()) {
        throw DimensionError("pcp_histogram: matrices differ in shape");
    }
    if (pcp_real.rows() != pcp_real.cols()) throw DimensionError("pcp_histogram: PCP matrices must be square");
    if (bins < 1) throw ConfigError("pcp_histogram: need at least one bin");
    if (!(underflow_threshold > 0.0 && underflow_threshold < 1.0)) {
        throw ConfigError("pcp_histogram: threshold must lie in (0,1)");
    }

    PcpHistogram h;
    h.underflow_threshold = underflow_threshold;
    const double lo = std::log10(underflow_threshold);
    const Eigen::VectorXd exponents = Eigen::VectorXd::LinSpaced(bins + 1, lo, 0.0);
    for (int b = 0; b <= bins; ++b) h.edges.push_back(std::pow(10.0, exponents(b)));
    for (int b = 0; b < bins; ++b) h.bin_centers.push_back(std::pow(10.0, 0.5 * (exponents(b) + exponents(b + 1))));
    h.count_real.assign(static_cast<std::size_t>(bins), 0);
    h.count_sim.assign(static_cast<std::size_t>(bins), 0);

    const double width = -lo / bins;
    auto bin_of = [&](double v) {
        if (!(v > underflow_threshold)) return 0;
        const int b = static_cast<int>(std::floor((std::log10(v) - lo) / width));
        return std::clamp(b, 0, bins - 1);
    };
    for (Eigen::Index s = 0; s < pcp_real.rows(); ++s) {
        for (Eigen::Index t = 0; t < pcp_real.cols(); ++t) {
            if (s == t) continue;
            ++h.count_real[static_cast<std::size_t>(bin_of(pcp_real(s, t)))];
            ++h.count_sim[static_cast<std::size_t>(bin_of(pcp_sim(s, t)))];
        }
    }
    return h;
}

}  // namespace prpmine
