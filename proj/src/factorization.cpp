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

#include "prpmine/factorization.hpp"

#include <cmath>

namespace prpmine {

namespace {
bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }
}  // namespace

void Factorization::check_invariants() const {
    if (z.cols() != u.rows()) throw DimensionError("Factorization: z has " + std::to_string(z.cols()) +
                                                   " columns but u has " + std::to_string(u.rows()) + " rows");
    if (beta.rows() != u.rows() || beta.cols() != u.cols()) throw DimensionError("Factorization: beta shape != u shape");
    if (!((beta.array() >= 0.0) && (beta.array() <= 1.0)).all()) {
        throw std::invalid_argument("Factorization: beta outside [0,1]");
    }
    if (!unit_interval(r) || !unit_interval(epsilon)) {
        throw std::invalid_argument("Factorization: r and epsilon must lie in [0,1]");
    }
    for (Eigen::Index k = 0; k < u.rows(); ++k) {
        for (Eigen::Index d = 0; d < u.cols(); ++d) {
            if (u(k, d) != (beta(k, d) < 0.5)) throw std::invalid_argument("Factorization: u is not binarize(beta)");
        }
    }
}

void FitConfig::validate() const {
    if (!(initial_temperature > 0.0) || !(final_temperature > 0.0)) {
        throw ConfigError("temperatures must be positive");
    }
    if (!(final_temperature < initial_temperature)) {
        throw ConfigError("final temperature must be below the initial temperature");
    }
    if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) throw ConfigError("cooling factor must lie in (0,1)");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (max_inner_iterations < 1) throw ConfigError("max inner iterations must be at least 1");
    if (parameter_tolerance < 0.0) throw ConfigError("parameter tolerance must be non-negative");
}

}  // namespace prpmine
