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

#include <cmath>
#include <limits>
#include <utility>

namespace prpmine::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

/// log(e^a + e^b)
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

/// log(e^a - e^b) for a >= b; -inf when equal.
inline double log_diff_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (!(b < a)) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

}  // namespace prpmine::detail
