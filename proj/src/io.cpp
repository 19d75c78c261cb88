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

#include "prpmine/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "prpmine/csv.hpp"

namespace prpmine {

namespace {

using json = nlohmann::json;

std::string member_names(std::span<const int> members, std::span<const std::string> names) {
    std::string out;
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (j) out += ';';
        const auto d = static_cast<std::size_t>(members[j]);
        out += d < names.size() ? names[d] : std::to_string(d);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const Factorization& f, std::span<const std::string> names) {
    json j;
    j["K"] = f.K();
    json u = json::array();
    json beta = json::array();
    for (Eigen::Index k = 0; k < f.K(); ++k) {
        json urow = json::array();
        json brow = json::array();
        for (Eigen::Index d = 0; d < f.D(); ++d) {
            urow.push_back(f.u(k, d) ? 1 : 0);
            brow.push_back(f.beta(k, d));
        }
        u.push_back(std::move(urow));
        beta.push_back(std::move(brow));
    }
    j["u"] = std::move(u);
    const Eigen::VectorXi counts = f.z_counts();
    j["z_counts"] = std::vector<int>(counts.data(), counts.data() + counts.size());
    j["beta"] = std::move(beta);
    j["r"] = f.r;
    j["epsilon"] = f.epsilon;
    j["log_likelihood"] = f.log_likelihood;
    j["seed"] = f.seed;
    if (!names.empty()) j["permissions"] = std::vector<std::string>(names.begin(), names.end());
    return j;
}

void write_instability_csv(std::ostream& out, const InstabilityReport& report) {
    write_csv_row(out, {"K", "repetition", "seed", "s", "median_s", "std_s", "selected"});
    for (const auto& rec : report.records) {
        for (std::size_t rep = 0; rep < rec.s.size(); ++rep) {
            write_csv_row(out, {std::to_string(rec.K), std::to_string(rep), std::to_string(rec.seeds[rep]),
                                format_double(rec.s[rep]), format_double(rec.median_s), format_double(rec.std_s),
                                rec.K == report.selected_k ? "1" : "0"});
        }
    }
}

void write_error_curves_csv(std::ostream& out, std::span<const std::pair<std::string, ErrorRates>> curves) {
    write_csv_row(out, {"tag", "t", "fraction_fn_gt_t", "fraction_fp_gt_t"});
    for (const auto& [tag, rates] : curves) {
        for (std::size_t t = 0; t < rates.fraction_fn_above.size(); ++t) {
            write_csv_row(out, {tag, std::to_string(t), format_double(rates.fraction_fn_above[t]),
                                format_double(rates.fraction_fp_above[t])});
        }
    }
}

void write_residuals_csv(std::ostream& out, const std::string& tag, const ErrorRates& rates,
                         std::span<const std::string> ids) {
    for (Eigen::Index i = 0; i < rates.fn.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        write_csv_row(out, {tag, ii < ids.size() ? ids[ii] : std::to_string(i), std::to_string(rates.fn(i)),
                            std::to_string(rates.fp(i))});
    }
}

void write_pcp_csv(std::ostream& out, const PcpMatrix& pcp, std::span<const std::string> names) {
    const Eigen::Index dim = pcp.p.rows();
    auto name = [&](Eigen::Index d) {
        return static_cast<std::size_t>(d) < names.size() ? names[static_cast<std::size_t>(d)] : std::to_string(d);
    };
    std::vector<std::string> header{"permission"};
    for (Eigen::Index t = 0; t < dim; ++t) header.push_back(name(t));
    write_csv_row(out, header);
    for (Eigen::Index s = 0; s < dim; ++s) {
        std::vector<std::string> row{name(s)};
        for (Eigen::Index t = 0; t < dim; ++t) row.push_back(format_double(pcp.p(s, t)));
        write_csv_row(out, row);
    }
}

void write_pattern_summary_csv(std::ostream& out, std::span<const PatternSummary> patterns,
                               std::span<const std::string> names) {
    write_csv_row(out, {"pattern", "frequency", "kl_bits", "permissions"});
    for (const auto& p : patterns) {
        write_csv_row(out, {std::to_string(p.pattern), format_double(p.frequency),
                            p.kl_bits ? format_double(*p.kl_bits) : "", member_names(p.members, names)});
    }
}

void write_histogram_csv(std::ostream& out, const PcpHistogram& h) {
    write_csv_row(out, {"bin_center", "count_real", "count_sim"});
    for (std::size_t b = 0; b < h.bin_centers.size(); ++b) {
        write_csv_row(out, {format_double(h.bin_centers[b]), std::to_string(h.count_real[b]),
                            std::to_string(h.count_sim[b])});
    }
}

json to_json(const EvaluationReport& report, std::span<const std::string> names) {
    json j;
    const auto& e = report.errors;
    j["mean_fn"] = e.mean_fn;
    j["mean_fp"] = e.mean_fp;
    j["fn"] = std::vector<int>(e.fn.data(), e.fn.data() + e.fn.size());
    j["fp"] = std::vector<int>(e.fp.data(), e.fp.data() + e.fp.size());
    j["fraction_fn_above"] = e.fraction_fn_above;
    j["fraction_fp_above"] = e.fraction_fp_above;
    json pcp = json::array();
    for (Eigen::Index s = 0; s < report.pcp.p.rows(); ++s) {
        std::vector<double> row(static_cast<std::size_t>(report.pcp.p.cols()));
        for (Eigen::Index t = 0; t < report.pcp.p.cols(); ++t) row[static_cast<std::size_t>(t)] = report.pcp.p(s, t);
        pcp.push_back(row);
    }
    j["pcp"] = std::move(pcp);
    j["undefined_columns"] = report.pcp.undefined_columns;
    j["average_pcp"] = {{"value", report.average.value},
                        {"pairs", report.average.pairs},
                        {"degenerate", report.average.degenerate}};
    json patterns = json::array();
    for (const auto& p : report.patterns) {
        json pj{{"pattern", p.pattern}, {"frequency", p.frequency}, {"members", p.members}};
        pj["kl_bits"] = p.kl_bits ? json(*p.kl_bits) : json(nullptr);
        if (!names.empty()) pj["permissions"] = member_names(p.members, names);
        patterns.push_back(std::move(pj));
    }
    j["patterns"] = std::move(patterns);
    if (!names.empty()) j["permission_names"] = std::vector<std::string>(names.begin(), names.end());
    return j;
}

json to_json(const SummaryStats& stats) {
    json j;
    j["apps"] = stats.apps;
    json freq = json::array();
    for (const auto& f : stats.frequencies) freq.push_back({{"permission", f.name}, {"count", f.count}, {"fraction", f.fraction}});
    j["frequencies"] = std::move(freq);
    j["price_points"] = stats.prices.size();
    j["rated_apps"] = stats.ratings.size();
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace prpmine
