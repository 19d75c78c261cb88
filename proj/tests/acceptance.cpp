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

// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers as arguments to
// run a subset. Criterion 12 runs only when PRPMINE_REAL_DATASET names the
// published app dataset (PRPMINE_REAL_COLUMN_MAP may name a column mapping).

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "prpmine/assignment.hpp"
#include "prpmine/bmf.hpp"
#include "prpmine/evaluation.hpp"
#include "prpmine/ingest.hpp"
#include "prpmine/model_selection.hpp"
#include "prpmine/random.hpp"
#include "prpmine/simulator.hpp"

using namespace prpmine;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class Outcome { pass, fail, skip };

struct Result {
    Outcome outcome = Outcome::fail;
    std::string detail;
};

Result verdict(bool ok, const std::string& detail) { return {ok ? Outcome::pass : Outcome::fail, detail}; }

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

FitConfig fit_config(std::uint64_t seed) {
    FitConfig c;
    c.seed = seed;
    c.threads = worker_threads();
    return c;
}

PlantConfig planted_family(std::uint64_t seed) {
    PlantConfig pc;
    pc.n = 2000;
    pc.d = 50;
    pc.k = 5;
    pc.pattern_density = 0.2;
    pc.assign_density = 0.3;
    pc.epsilon = 0.05;
    pc.r = 0.5;
    pc.seed = seed;
    return pc;
}

/// Fresh rows from a fixed pattern matrix u under the planted generator.
BinaryMatrix sample_rows(const BinaryMatrix& u, Eigen::Index n, double assign_density, double epsilon, double r,
                         std::uint64_t seed) {
    Rng rng(seed);
    BitMatrix z(n, u.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < u.rows(); ++k) z(i, k) = bernoulli(rng, assign_density) ? 1 : 0;
    }
    const auto clean = oracle::boolean_product(BinaryMatrix(z), u);
    BitMatrix x(n, u.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index d = 0; d < u.cols(); ++d) {
            x(i, d) = static_cast<std::uint8_t>(clean[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)]);
            if (bernoulli(rng, epsilon)) x(i, d) = bernoulli(rng, r) ? 1 : 0;
        }
    }
    return BinaryMatrix(std::move(x));
}

double mean_residual(const ErrorRates& e) { return e.mean_fn + e.mean_fp; }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Result boolean_product_oracle() {
    Rng rng(101);
    const auto start = Clock::now();
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        const auto k = static_cast<Eigen::Index>(1 + uniform_index(rng, 8));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 15));
        const BinaryMatrix z = oracle::random_matrix(rng, n, k, uniform01(rng));
        const BinaryMatrix u = oracle::random_matrix(rng, k, d, uniform01(rng));
        const BinaryMatrix c = boolean_product(z, u);
        const auto ref = oracle::boolean_product(z, u);
        bool same = c.rows() == n && c.cols() == d;
        for (Eigen::Index i = 0; same && i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) same = same && int(c(i, j)) == ref[std::size_t(i)][std::size_t(j)];
        }
        mismatches += !same;
    }
    const double elapsed = seconds_since(start);
    return verdict(mismatches == 0 && elapsed < 1.0, fmt("mismatches=%d time=%.3fs", mismatches, elapsed));
}

Result likelihood_oracle() {
    Rng rng(202);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 15));
        const auto k = static_cast<Eigen::Index>(1 + uniform_index(rng, 5));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 12));
        const BinaryMatrix x = oracle::random_matrix(rng, n, d, 0.4);
        const BinaryMatrix z = oracle::random_matrix(rng, n, k, 0.5);
        const Eigen::MatrixXd beta = oracle::random_beta(rng, k, d);
        const double r = 0.05 + 0.9 * uniform01(rng);
        const double eps = 0.01 + 0.5 * uniform01(rng);
        worst = std::max(worst, std::abs(log_likelihood(x, z, beta, r, eps) - oracle::log_likelihood(x, z, beta, r, eps)));
    }
    return verdict(worst <= 1e-9, fmt("max abs difference=%.3g", worst));
}

Result em_monotonicity() {
    Rng rng(303);
    const BinaryMatrix x = plant_factorization({200, 20, 4, 0.25, 0.3, 0.1, 0.5, 17}).x;
    const auto start = Clock::now();
    double worst = 0.0;
    int steps = 0;
    for (int init = 0; init < 100; ++init) {
        const int k = 1 + static_cast<int>(uniform_index(rng, 6));
        const double temperature = std::array{2.0, 1.0, 0.5, 0.1}[uniform_index(rng, 4)];
        FitState s = initial_state(x, k, 1000 + static_cast<std::uint64_t>(init), temperature);
        double previous = tempered_log_likelihood(x, s);
        for (int it = 0; it < 5; ++it) {
            s = em_step(x, s);
            const double now = tempered_log_likelihood(x, s);
            worst = std::max(worst, previous - now);
            previous = now;
            ++steps;
        }
    }
    const double elapsed = seconds_since(start);
    return verdict(worst <= 1e-9 && elapsed < 30.0,
                   fmt("steps=%d largest decrease=%.3g time=%.2fs", steps, worst, elapsed));
}

Result planted_recovery() {
    int good = 0;
    double slowest = 0.0;
    std::ostringstream per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PlantedModel m = plant_factorization(planted_family(seed));
        const auto start = Clock::now();
        const Factorization f = fit(m.x, 5, fit_config(seed));
        const double elapsed = seconds_since(start);
        slowest = std::max(slowest, elapsed);
        const double error = double(oracle::min_perm_cost(f.u, m.u)) / double(m.u.rows() * m.u.cols());
        const bool ok = error <= 0.02 && std::abs(f.epsilon - 0.05) <= 0.03 && elapsed < 60.0;
        good += ok;
        per_seed << " [seed " << seed << ": err=" << fmt("%.4f", error) << " eps=" << fmt("%.4f", f.epsilon)
                 << " t=" << fmt("%.1fs", elapsed) << (ok ? "" : " miss") << "]";
    }
    return verdict(good >= 4, fmt("%d/5 seeds recovered", good) + per_seed.str());
}

Result model_selection() {
    const PlantedModel m = plant_factorization(planted_family(7));
    std::vector<int> ks;
    for (int k = 2; k <= 10; ++k) ks.push_back(k);
    const auto start = Clock::now();
    const InstabilityReport report = select_k(m.x, ks, 5, fit_config(7));
    const double elapsed = seconds_since(start);
    std::ostringstream medians;
    for (const auto& rec : report.records) medians << " " << rec.K << ":" << fmt("%.4f", rec.median_s);
    return verdict(report.selected_k == 5 && elapsed < 600.0,
                   fmt("selected K=%d time=%.0fs medians", report.selected_k, elapsed) + medians.str());
}

Result instability_calibration() {
    Rng rng(606);
    bool ok = true;
    std::ostringstream detail;
    for (int k : {2, 5, 8}) {
        const BinaryMatrix a = oracle::random_matrix(rng, 10000, k, 0.5);
        const BinaryMatrix b = oracle::random_matrix(rng, 10000, k, 0.5);
        std::vector<int> identity(static_cast<std::size_t>(k));
        std::iota(identity.begin(), identity.end(), 0);
        const double same = instability_score(a, a, identity);
        const double same_ex = exhaustive_instability_score(a, a);
        const double random_id = instability_score(a, b, identity);
        const double random_ex = exhaustive_instability_score(a, b);
        ok = ok && same == 0.0 && same_ex == 0.0 && std::abs(random_id - 1.0) <= 0.05 && std::abs(random_ex - 1.0) <= 0.05;
        detail << fmt(" [K=%d identical=%g random=%.4f random(best perm)=%.4f]", k, same, random_id, random_ex);
    }
    return verdict(ok, detail.str().substr(1));
}

Result permutation_matching() {
    Rng rng(707);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const auto k = static_cast<Eigen::Index>(1 + uniform_index(rng, 8));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        const BinaryMatrix u1 = oracle::random_matrix(rng, k, d, 0.3);
        const BinaryMatrix u2 = oracle::random_matrix(rng, k, d, 0.3);
        const std::vector<int> perm = match_patterns(u1, u2);
        mismatches += oracle::perm_cost(u1, u2, perm) != oracle::min_perm_cost(u1, u2);
    }
    return verdict(mismatches == 0, fmt("pairs not at the exhaustive minimum=%d", mismatches));
}

Result pcp_oracle() {
    Rng rng(808);
    double worst = 0.0;
    bool diagonal = true;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 60));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 25));
        const BinaryMatrix x = oracle::random_matrix(rng, n, d, 0.05 + 0.5 * uniform01(rng));
        const PcpMatrix p = pcp_matrix(x);
        worst = std::max(worst, (p.p - oracle::pcp(x)).cwiseAbs().maxCoeff());
        const Eigen::VectorXi counts = x.col_counts();
        for (Eigen::Index c = 0; c < d; ++c) {
            if (counts(c) > 0) diagonal = diagonal && p.p(c, c) == 1.0;
        }
    }
    return verdict(worst <= 1e-12 && diagonal, fmt("max abs difference=%.3g diagonal exact=%s", worst, diagonal ? "yes" : "no"));
}

Result residual_identities() {
    PlantConfig pc = planted_family(9);
    pc.epsilon = 0.0;
    const PlantedModel m = plant_factorization(pc);
    const Factorization f = fit(m.x, 5, fit_config(9));
    const ErrorRates e = error_rates(m.x, f.z, f.u);
    const bool noiseless = e.fn.sum() == 0 && e.fp.sum() == 0;

    Rng rng(909);
    int mismatches = 0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 30));
        const auto k = static_cast<Eigen::Index>(1 + uniform_index(rng, 6));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        const BinaryMatrix x = oracle::random_matrix(rng, n, d, 0.4);
        const BinaryMatrix z = oracle::random_matrix(rng, n, k, 0.4);
        const BinaryMatrix u = oracle::random_matrix(rng, k, d, 0.3);
        const auto ref = oracle::boolean_product(z, u);
        std::int64_t hamming = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) hamming += int(x(i, j)) != ref[std::size_t(i)][std::size_t(j)];
        }
        const ErrorRates r = error_rates(x, z, u);
        mismatches += r.fn.sum() + r.fp.sum() != hamming;
    }
    return verdict(noiseless && mismatches == 0,
                   fmt("noiseless fit fn=%d fp=%d; triples with fn+fp != Hamming=%d", int(e.fn.sum()), int(e.fp.sum()),
                       mismatches));
}

Result simulation_separation() {
    const BinaryMatrix structured = plant_factorization(planted_family(10)).x;
    const BinaryMatrix sim = simulate_independent(marginal_probs(structured), structured.rows(), 11);
    const double real_avg = average_pcp(pcp_matrix(structured)).value;
    const double sim_avg = average_pcp(pcp_matrix(sim)).value;

    Rng rng(1010);
    Eigen::VectorXd p(50);
    for (Eigen::Index d = 0; d < p.size(); ++d) p(d) = 0.02 + 0.3 * uniform01(rng);
    const BinaryMatrix independent = simulate_independent(p, 2000, 12);
    const BinaryMatrix resim = simulate_independent(marginal_probs(independent), independent.rows(), 13);
    const double ind_avg = average_pcp(pcp_matrix(independent)).value;
    const double resim_avg = average_pcp(pcp_matrix(resim)).value;
    const double rel = std::abs(ind_avg - resim_avg) / ind_avg;
    return verdict(real_avg > sim_avg && rel <= 0.2,
                   fmt("structured real=%.4f simulated=%.4f; independent real=%.4f simulated=%.4f (rel diff %.3f)",
                       real_avg, sim_avg, ind_avg, resim_avg, rel));
}

Result reputation_separation() {
    const PlantConfig pc = planted_family(11);
    const PlantedModel m = plant_factorization(pc);
    const Factorization f = fit(m.x, 5, fit_config(11));
    const double train = mean_residual(error_rates(m.x, f.z, f.u));

    const BinaryMatrix same = sample_rows(m.u, 500, pc.assign_density, pc.epsilon, pc.r, 1111);
    const double same_res = mean_residual(error_rates(same, assign_patterns(same, f.u, f.r, f.epsilon), f.u));

    const PlantedModel other = plant_factorization(planted_family(1112));
    const BinaryMatrix disjoint = sample_rows(other.u, 500, pc.assign_density, pc.epsilon, pc.r, 1113);
    const double dis_res = mean_residual(error_rates(disjoint, assign_patterns(disjoint, f.u, f.r, f.epsilon), f.u));

    const bool ok = std::abs(same_res - train) <= 0.1 * train && dis_res >= 2.0 * train;
    return verdict(ok, fmt("mean residual train=%.3f same-model test=%.3f disjoint-model test=%.3f", train, same_res,
                           dis_res));
}

bool is_permission(const std::string& name, std::initializer_list<const char*> forms) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const char* f : forms) {
        if (lower == f || lower == std::string("android.permission.") + f) return true;
    }
    return false;
}

Result real_dataset() {
    const char* path = std::getenv("PRPMINE_REAL_DATASET");
    if (!path || !*path) return {Outcome::skip, "PRPMINE_REAL_DATASET not set"};
    const char* map_path = std::getenv("PRPMINE_REAL_COLUMN_MAP");
    const ColumnMapping mapping =
        map_path && *map_path ? ColumnMapping::from_json_file(map_path) : ColumnMapping{};
    const Dataset ds = load_dataset(path, std::string(path).ends_with(".json") ? Format::json : Format::csv, mapping);
    const BinaryMatrix x = ds.matrix();
    const Eigen::VectorXi counts = x.col_counts();
    const double top = 100.0 * double(counts.maxCoeff()) / double(x.rows());

    const Factorization f = fit(x, 30, fit_config(12));
    std::optional<double> found;
    for (Eigen::Index k = 0; k < f.K(); ++k) {
        std::vector<std::string> members;
        for (Eigen::Index d = 0; d < f.D(); ++d) {
            if (f.u(k, d)) members.push_back(ds.vocabulary[std::size_t(d)]);
        }
        if (members.size() != 2) continue;
        const auto internet = [](const std::string& n) { return is_permission(n, {"internet", "full internet access"}); };
        const auto network = [](const std::string& n) {
            return is_permission(n, {"access_network_state", "view network state"});
        };
        if ((internet(members[0]) && network(members[1])) || (internet(members[1]) && network(members[0]))) {
            const double share = 100.0 * double(f.z.col_counts()(k)) / double(x.rows());
            if (!found || std::abs(share - 18.05) < std::abs(*found - 18.05)) found = share;
        }
    }
    const bool ok = std::abs(top - 69.76) <= 0.01 && found && std::abs(*found - 18.05) <= 3.0;
    return verdict(ok, fmt("top permission frequency=%.2f%%; internet+network pattern frequency=%s", top,
                           found ? fmt("%.2f%%", *found).c_str() : "absent"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"boolean product oracle", boolean_product_oracle},
        {"likelihood oracle", likelihood_oracle},
        {"EM monotonicity", em_monotonicity},
        {"planted recovery", planted_recovery},
        {"model selection", model_selection},
        {"instability calibration", instability_calibration},
        {"permutation matching", permutation_matching},
        {"PCP oracle", pcp_oracle},
        {"residual identities", residual_identities},
        {"simulation separation", simulation_separation},
        {"reputation separation", reputation_separation},
        {"published dataset", real_dataset},
    };
    std::set<int> selected;
    for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

    int failures = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const int number = static_cast<int>(c + 1);
        if (!selected.empty() && !selected.count(number)) continue;
        Result r;
        try {
            r = criteria[c].second();
        } catch (const std::exception& e) {
            r = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* label = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::skip ? "SKIP" : "FAIL";
        failures += r.outcome == Outcome::fail;
        std::printf("criterion %2d %s  %s: %s\n", number, label, criteria[c].first.c_str(), r.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
