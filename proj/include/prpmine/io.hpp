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

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prpmine/evaluation.hpp"
#include "prpmine/factorization.hpp"
#include "prpmine/ingest.hpp"
#include "prpmine/model_selection.hpp"
#include "prpmine/simulator.hpp"

namespace prpmine {

/// Keys K, u, z_counts, beta, r, epsilon, log_likelihood, seed; u and beta as
/// row arrays. `names` (permission vocabulary) is added as "permissions" when given.
nlohmann::json to_json(const Factorization& f, std::span<const std::string> names = {});

/// CSV: K, repetition, seed, s, median_s, std_s, selected.
void write_instability_csv(std::ostream& out, const InstabilityReport& report);

/// CSV: tag, t, fraction_fn_gt_t, fraction_fp_gt_t.
void write_error_curves_csv(std::ostream& out, std::span<const std::pair<std::string, ErrorRates>> curves);

/// CSV: tag, id, fn, fp (one row per application).
void write_residuals_csv(std::ostream& out, const std::string& tag, const ErrorRates& rates,
                         std::span<const std::string> ids);

/// D x D table with a leading "permission" column and the names as header.
void write_pcp_csv(std::ostream& out, const PcpMatrix& pcp, std::span<const std::string> names);

/// CSV: pattern, frequency, kl_bits, permissions (';'-joined names).
void write_pattern_summary_csv(std::ostream& out, std::span<const PatternSummary> patterns,
                               std::span<const std::string> names);

/// CSV: bin_center, count_real, count_sim.
void write_histogram_csv(std::ostream& out, const PcpHistogram& h);

nlohmann::json to_json(const EvaluationReport& report, std::span<const std::string> names = {});
nlohmann::json to_json(const SummaryStats& stats);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prpmine
