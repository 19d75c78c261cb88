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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "prpmine/bmf.hpp"
#include "prpmine/evaluation.hpp"
#include "prpmine/ingest.hpp"
#include "prpmine/io.hpp"
#include "prpmine/model_selection.hpp"
#include "prpmine/parallel.hpp"
#include "prpmine/random.hpp"
#include "prpmine/simulator.hpp"

#ifndef PRPMINE_VERSION
#define PRPMINE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace prpmine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", digest[i]);
        hex += byte;
    }
    return hex;
}

struct CommonOptions {
    std::string input;
    std::string format = "csv";
    std::string column_map;
    std::uint64_t seed = 0;
    unsigned threads = default_thread_count();
    std::string out_dir = ".";
};

struct FitOptions {
    double initial_temperature = 2.0;
    double cooling_factor = 0.95;
    double final_temperature = 0.05;
    double tolerance = 1e-5;
    int max_inner_iterations = 50;

    FitConfig config(std::uint64_t seed, unsigned threads) const {
        FitConfig c;
        c.initial_temperature = initial_temperature;
        c.cooling_factor = cooling_factor;
        c.final_temperature = final_temperature;
        c.tolerance = tolerance;
        c.max_inner_iterations = max_inner_iterations;
        c.seed = seed;
        c.threads = threads;
        c.validate();
        return c;
    }

    json echo() const {
        return {{"initial_temperature", initial_temperature},
                {"cooling_factor", cooling_factor},
                {"final_temperature", final_temperature},
                {"tolerance", tolerance},
                {"max_inner_iterations", max_inner_iterations}};
    }
};

/// Records what a run read and wrote; written as manifest.json even when the run fails.
class RunManifest {
public:
    RunManifest(std::string command, const CommonOptions& common)
        : command_(std::move(command)), out_dir_(common.out_dir), start_(std::chrono::steady_clock::now()) {
        config_ = {{"input", common.input},   {"format", common.format}, {"column_map", common.column_map},
                   {"seed", common.seed},     {"threads", common.threads}, {"out_dir", common.out_dir}};
        seed_ = common.seed;
    }

    json& config() { return config_; }
    json& results() { return results_; }
    void stage(std::string name) { stage_ = std::move(name); }

    void add_input(const fs::path& path) { inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}}); }

    /// Writes `text` into the output directory and lists it.
    void write_output(const std::string& name, const std::string& text) {
        const fs::path path = out_dir_ / name;
        write_text_file(path, text);
        outputs_.push_back({{"path", name}, {"sha256", sha256_file(path)}});
    }

    void finish(const std::string& error = {}) {
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m{{"command", command_},
               {"tool_version", PRPMINE_VERSION},
               {"seed", seed_},
               {"config", config_},
               {"inputs", inputs_},
               {"outputs", outputs_},
               {"results", results_},
               {"duration_seconds", seconds},
               {"status", error.empty() ? "ok" : "failed"}};
        m["failed_stage"] = error.empty() ? json(nullptr) : json(stage_);
        m["error"] = error.empty() ? json(nullptr) : json(error);
        write_text_file(out_dir_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path out_dir_;
    std::chrono::steady_clock::time_point start_;
    json config_;
    json results_ = json::object();
    json inputs_ = json::array();
    json outputs_ = json::array();
    std::string stage_ = "setup";
    std::uint64_t seed_ = 0;
};

Dataset load_input(const CommonOptions& common, RunManifest& manifest) {
    manifest.stage("load");
    if (common.input.empty()) throw ConfigError("--input is required");
    if (!fs::exists(common.input)) throw std::invalid_argument("input file not found: " + common.input);
    const Format format = parse_format(common.format);
    ColumnMapping mapping;
    if (!common.column_map.empty()) {
        if (!fs::exists(common.column_map)) throw std::invalid_argument("column map not found: " + common.column_map);
        mapping = ColumnMapping::from_json_file(common.column_map);
        manifest.add_input(common.column_map);
    }
    manifest.add_input(common.input);
    Dataset ds = load_dataset(common.input, format, mapping);
    manifest.results()["apps"] = ds.size();
    manifest.results()["permissions"] = ds.vocabulary.size();
    manifest.results()["missing_rating_ids"] = ds.missing_rating_ids;
    return ds;
}

template <typename Write>
std::string render(Write&& write) {
    std::ostringstream out;
    write(out);
    return out.str();
}

void run_stats(const CommonOptions& common, std::size_t top_n, RunManifest& manifest) {
    manifest.config()["top_n"] = top_n;
    const Dataset ds = load_input(common, manifest);
    manifest.stage("summarize");
    const SummaryStats stats = summary_stats(ds, top_n);
    manifest.stage("write");
    manifest.write_output("frequencies.csv", render([&](std::ostream& out) {
        write_csv_row(out, {"rank", "permission", "count", "fraction"});
        for (std::size_t j = 0; j < stats.frequencies.size(); ++j) {
            const auto& f = stats.frequencies[j];
            write_csv_row(out, {std::to_string(j + 1), f.name, std::to_string(f.count), format_double(f.fraction)});
        }
    }));
    manifest.write_output("prices.csv", render([&](std::ostream& out) {
        write_csv_row(out, {"price", "count", "cumulative_fraction"});
        for (const auto& p : stats.prices) {
            write_csv_row(out, {format_double(p.price), std::to_string(p.count), format_double(p.cumulative_fraction)});
        }
    }));
    manifest.write_output("ratings.csv", render([&](std::ostream& out) {
        write_csv_row(out, {"id", "avg_rating", "num_ratings"});
        for (const auto& r : stats.ratings) {
            write_csv_row(out, {r.id, format_double(r.avg_rating), std::to_string(r.num_ratings)});
        }
    }));
    auto histogram = [](const std::vector<HistogramBin>& bins) {
        return render([&](std::ostream& out) {
            write_csv_row(out, {"lower", "upper", "count"});
            for (const auto& b : bins) {
                write_csv_row(out, {format_double(b.lower), format_double(b.upper), std::to_string(b.count)});
            }
        });
    };
    manifest.write_output("rating_histogram.csv", histogram(stats.rating_histogram));
    manifest.write_output("rating_count_histogram.csv", histogram(stats.count_histogram));
    manifest.write_output("summary.json", to_json(stats).dump(2) + "\n");
}

struct SelectOptions {
    int k_min = 2;
    int k_max = 10;
    int repetitions = 5;
    bool exhaustive = false;
};

void run_select_k(const CommonOptions& common, const SelectOptions& opt, const FitOptions& fit_opt,
                  RunManifest& manifest) {
    manifest.config()["k_min"] = opt.k_min;
    manifest.config()["k_max"] = opt.k_max;
    manifest.config()["repetitions"] = opt.repetitions;
    manifest.config()["exhaustive"] = opt.exhaustive;
    manifest.config()["fit"] = fit_opt.echo();
    const Dataset ds = load_input(common, manifest);
    manifest.stage("validate");
    const BinaryMatrix x = ds.matrix();
    if (opt.k_min < 1 || opt.k_min > opt.k_max) throw ConfigError("need 1 <= k-min <= k-max");
    if (opt.k_max > x.cols()) {
        throw ConfigError("k-max = " + std::to_string(opt.k_max) + " exceeds the number of permissions D = " +
                          std::to_string(x.cols()));
    }
    if (opt.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (x.rows() < 2) throw ConfigError("need at least two applications");
    if (opt.exhaustive && opt.k_max > kMaxExhaustiveK) throw ConfigError("--exhaustive supports K <= 8 only");
    const FitConfig config = fit_opt.config(common.seed, common.threads);

    manifest.stage("fit");
    InstabilityReport report;
    json failures = json::array();
    for (int k = opt.k_min; k <= opt.k_max; ++k) {
        try {
            report.records.push_back(instability(x, k, opt.repetitions, config,
                                                 opt.exhaustive ? MatchMode::exhaustive : MatchMode::pattern_hamming));
        } catch (const std::exception& e) {
            failures.push_back({{"K", k}, {"error", e.what()}});
        }
    }
    manifest.results()["failures"] = failures;
    if (report.records.empty()) throw NumericError("instability failed for every K");
    report.selected_k = choose_k(report.records);
    manifest.results()["selected_k"] = report.selected_k;

    manifest.stage("write");
    manifest.write_output("instability.csv", render([&](std::ostream& out) { write_instability_csv(out, report); }));
}

struct MineOptions {
    int K = 0;
    std::string reputation_config;
    double min_rating = 4.0;
    std::int64_t min_ratings = 100;
    std::int64_t low_max_ratings = 10;
    std::string test_size = "auto";
};

ReputationCriteria reputation_criteria(const MineOptions& opt, const Dataset& ds, std::uint64_t seed) {
    ReputationCriteria c;
    c.min_rating = opt.min_rating;
    c.min_ratings = opt.min_ratings;
    c.low_max_ratings = opt.low_max_ratings;
    std::string test_size = opt.test_size;
    if (!opt.reputation_config.empty()) {
        std::ifstream in(opt.reputation_config);
        if (!in) throw std::invalid_argument("cannot open reputation config: " + opt.reputation_config);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw std::invalid_argument("reputation config: " + std::string(e.what()));
        }
        try {
            for (const auto& [key, value] : j.items()) {
                if (key == "min_rating") {
                    c.min_rating = value.get<double>();
                } else if (key == "min_ratings") {
                    c.min_ratings = value.get<std::int64_t>();
                } else if (key == "low_max_ratings") {
                    c.low_max_ratings = value.get<std::int64_t>();
                } else if (key == "test_size") {
                    test_size = value.is_string() ? value.get<std::string>() : std::to_string(value.get<std::int64_t>());
                } else {
                    throw ConfigError("reputation config: unknown key '" + key + "'");
                }
            }
        } catch (const json::exception& e) {
            throw ConfigError("reputation config: " + std::string(e.what()));
        }
    }
    if (test_size == "auto") {
        c.test_size = auto_test_size(count_high_reputation(ds, c));
    } else {
        try {
            const long long v = std::stoll(test_size);
            if (v < 0) throw std::invalid_argument("negative");
            c.test_size = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw ConfigError("test size must be a non-negative integer or 'auto'");
        }
    }
    c.seed = derive_seed(seed, 1);
    c.validate();
    return c;
}

void run_mine(const CommonOptions& common, const MineOptions& opt, const FitOptions& fit_opt, RunManifest& manifest) {
    manifest.config()["K"] = opt.K;
    manifest.config()["fit"] = fit_opt.echo();
    manifest.config()["reputation_config"] = opt.reputation_config;
    if (!opt.reputation_config.empty() && fs::exists(opt.reputation_config)) manifest.add_input(opt.reputation_config);
    const Dataset ds = load_input(common, manifest);

    manifest.stage("filter");
    if (opt.K < 1) throw ConfigError("K must be at least 1");
    const ReputationCriteria criteria = reputation_criteria(opt, ds, common.seed);
    manifest.config()["reputation"] = {{"min_rating", criteria.min_rating},
                                       {"min_ratings", criteria.min_ratings},
                                       {"low_max_ratings", criteria.low_max_ratings},
                                       {"test_size", criteria.test_size},
                                       {"split_seed", criteria.seed}};
    const ReputationSplit split = filter_reputation(ds, criteria);
    manifest.results()["train_size"] = split.train.size();
    manifest.results()["test_high_size"] = split.test_high.size();
    manifest.results()["test_low_size"] = split.test_low.size();
    if (split.train.empty()) throw ConfigError("training set is empty after reputation filtering");

    manifest.stage("fit");
    const BinaryMatrix train = ds.matrix(split.train);
    const Factorization f = fit(train, opt.K, fit_opt.config(derive_seed(common.seed, 2), common.threads));
    manifest.results()["log_likelihood"] = f.log_likelihood;
    manifest.results()["epsilon"] = f.epsilon;
    manifest.results()["r"] = f.r;

    manifest.stage("evaluate");
    const std::vector<std::string> train_categories = ds.categories(split.train);
    const EvaluationReport train_report = evaluate(train, f.z, f.u, train_categories);
    std::vector<std::pair<std::string, ErrorRates>> curves{{"train", train_report.errors}};
    std::ostringstream residuals;
    write_csv_row(residuals, {"tag", "id", "fn", "fp"});
    write_residuals_csv(residuals, "train", train_report.errors, train.row_labels());
    json set_means{{"train", {{"apps", train.rows()}, {"mean_fn", train_report.errors.mean_fn},
                              {"mean_fp", train_report.errors.mean_fp}}}};
    for (const auto& [tag, rows] : {std::pair{"test_high", &split.test_high}, std::pair{"test_low", &split.test_low}}) {
        const BinaryMatrix xt = ds.matrix(*rows);
        const BinaryMatrix zt = assign_patterns(xt, f.u, f.r, f.epsilon, common.threads);
        ErrorRates rates = error_rates(xt, zt, f.u);
        write_residuals_csv(residuals, tag, rates, xt.row_labels());
        set_means[tag] = {{"apps", xt.rows()}, {"mean_fn", rates.mean_fn}, {"mean_fp", rates.mean_fp}};
        curves.emplace_back(tag, std::move(rates));
    }
    manifest.results()["residuals"] = set_means;

    manifest.stage("write");
    manifest.write_output("factorization.json", to_json(f, ds.vocabulary).dump(2) + "\n");
    manifest.write_output("error_curves.csv", render([&](std::ostream& out) { write_error_curves_csv(out, curves); }));
    manifest.write_output("residuals.csv", residuals.str());
    manifest.write_output("pattern_summary.csv", render([&](std::ostream& out) {
        write_pattern_summary_csv(out, train_report.patterns, ds.vocabulary);
    }));
    manifest.write_output("pcp.csv", render([&](std::ostream& out) { write_pcp_csv(out, train_report.pcp, ds.vocabulary); }));
    json evaluation = to_json(train_report, ds.vocabulary);
    evaluation["sets"] = set_means;
    manifest.write_output("evaluation.json", evaluation.dump(2) + "\n");
}

struct SimulateOptions {
    int bins = 20;
    double threshold = 1e-3;
    long long n = 0;
};

void run_simulate(const CommonOptions& common, const SimulateOptions& opt, RunManifest& manifest) {
    manifest.config()["bins"] = opt.bins;
    manifest.config()["threshold"] = opt.threshold;
    manifest.config()["n"] = opt.n;
    const Dataset ds = load_input(common, manifest);
    manifest.stage("simulate");
    const BinaryMatrix x = ds.matrix();
    if (x.rows() < 1) throw ConfigError("input has no applications");
    if (opt.n < 0) throw ConfigError("--n must be non-negative");
    const Eigen::Index n = opt.n > 0 ? static_cast<Eigen::Index>(opt.n) : x.rows();
    const BinaryMatrix sim = simulate_independent(marginal_probs(x), n, derive_seed(common.seed, 3));
    const PcpMatrix pcp_real = pcp_matrix(x);
    const PcpMatrix pcp_sim = pcp_matrix(sim);
    const PcpHistogram h = pcp_histogram(pcp_real.p, pcp_sim.p, opt.bins, opt.threshold);
    const AveragePcp avg_real = average_pcp(pcp_real);
    const AveragePcp avg_sim = average_pcp(pcp_sim);
    const json summary{{"n_real", x.rows()},
                       {"n_simulated", n},
                       {"average_pcp_real", avg_real.value},
                       {"average_pcp_simulated", avg_sim.value},
                       {"pairs_real", avg_real.pairs},
                       {"pairs_simulated", avg_sim.pairs},
                       {"degenerate_real", avg_real.degenerate},
                       {"degenerate_simulated", avg_sim.degenerate}};
    manifest.results()["average_pcp_real"] = avg_real.value;
    manifest.results()["average_pcp_simulated"] = avg_sim.value;

    manifest.stage("write");
    manifest.write_output("pcp_histogram.csv", render([&](std::ostream& out) { write_histogram_csv(out, h); }));
    manifest.write_output("simulation.json", summary.dump(2) + "\n");
}

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--input", common.input, "Dataset file")->required();
    cmd->add_option("--format", common.format, "Input format: csv or json")->capture_default_str();
    cmd->add_option("--column-map", common.column_map, "JSON column-mapping file");
    cmd->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    cmd->add_option("--threads", common.threads, "Worker threads (1 = bit-reproducible)")->capture_default_str();
    cmd->add_option("--out-dir", common.out_dir, "Output directory")->capture_default_str();
}

void add_fit_options(CLI::App* cmd, FitOptions& f) {
    cmd->add_option("--initial-temperature", f.initial_temperature)->capture_default_str();
    cmd->add_option("--cooling-factor", f.cooling_factor)->capture_default_str();
    cmd->add_option("--final-temperature", f.final_temperature)->capture_default_str();
    cmd->add_option("--tolerance", f.tolerance)->capture_default_str();
    cmd->add_option("--max-inner-iterations", f.max_inner_iterations)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mine permission-request patterns with noisy-OR Boolean matrix factorization"};
    app.set_version_flag("--version", PRPMINE_VERSION);
    app.require_subcommand(1);

    CommonOptions common;
    FitOptions fit_opt;
    std::size_t top_n = 20;
    SelectOptions select_opt;
    MineOptions mine_opt;
    SimulateOptions sim_opt;

    auto* stats = app.add_subcommand("stats", "Permission frequencies, price and rating distributions");
    add_common(stats, common);
    stats->add_option("--top-n", top_n, "Rows in the frequency table")->capture_default_str();

    auto* select = app.add_subcommand("select-k", "Instability sweep over K");
    add_common(select, common);
    add_fit_options(select, fit_opt);
    select->add_option("--k-min", select_opt.k_min)->capture_default_str();
    select->add_option("--k-max", select_opt.k_max)->capture_default_str();
    select->add_option("--repetitions", select_opt.repetitions)->capture_default_str();
    select->add_flag("--exhaustive", select_opt.exhaustive, "Minimize the row disagreement over all relabelings (K <= 8)");

    auto* mine = app.add_subcommand("mine", "Fit K patterns on high-reputation apps and evaluate all sets");
    add_common(mine, common);
    add_fit_options(mine, fit_opt);
    mine->add_option("-K,--K", mine_opt.K, "Number of patterns")->required();
    mine->add_option("--reputation-config", mine_opt.reputation_config, "JSON file with reputation thresholds");
    mine->add_option("--min-rating", mine_opt.min_rating)->capture_default_str();
    mine->add_option("--min-ratings", mine_opt.min_ratings)->capture_default_str();
    mine->add_option("--low-max-ratings", mine_opt.low_max_ratings)->capture_default_str();
    mine->add_option("--test-size", mine_opt.test_size, "High-reputation test apps, or 'auto'")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Independent-request simulation and PCP histogram");
    add_common(simulate, common);
    simulate->add_option("--bins", sim_opt.bins)->capture_default_str();
    simulate->add_option("--threshold", sim_opt.threshold, "Lowest histogram edge")->capture_default_str();
    simulate->add_option("--n", sim_opt.n, "Simulated applications (0 = same as input)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << common.out_dir << ": " << ec.message() << "\n";
        return kExitInput;
    }
    RunManifest manifest(command, common);
    auto fail = [&](const std::exception& e, int code) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            manifest.finish(e.what());
        } catch (const std::exception& inner) {
            std::cerr << "error: could not write manifest: " << inner.what() << "\n";
        }
        return code;
    };
    try {
        if (command == "stats") {
            run_stats(common, top_n, manifest);
        } else if (command == "select-k") {
            run_select_k(common, select_opt, fit_opt, manifest);
        } else if (command == "mine") {
            run_mine(common, mine_opt, fit_opt, manifest);
        } else {
            run_simulate(common, sim_opt, manifest);
        }
        manifest.finish();
    } catch (const NumericError& e) {
        return fail(e, kExitNumeric);
    } catch (const std::invalid_argument& e) {
        return fail(e, kExitInput);
    } catch (const std::runtime_error& e) {
        return fail(e, kExitInput);
    } catch (const std::exception& e) {
        return fail(e, kExitNumeric);
    }
    return kExitOk;
}
