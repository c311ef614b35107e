// Copyright 2026 The qcoarse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end acceptance checks 1-9. Prints one PASS/FAIL line per check and
// exits non-zero if any check fails. Arguments pick a subset, e.g. `acceptance 2 6`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qcoarse/classical.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/hsmm.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/linalg.hpp"
#include "qcoarse/processes.hpp"
#include "qcoarse/qmodel.hpp"
#include "qcoarse/reproduce.hpp"
#include "qcoarse/simulate.hpp"

namespace {

using namespace qcoarse;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string &what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

ScanResult renewal(const WaitTimeDistribution &dist, int terms, int samples = kDefaultSamples) {
    ScanOptions o;
    o.samples = samples;
    return scan_epsilon(dist, terms, default_eps_grid(), o);
}

// Invariant and sampling checks do not depend on fit quality; a coarser
// grid keeps them fast.
constexpr int kCoarseSamples = 400;

struct Example {
    std::string name;
    WaitTimeDistribution dist;
    int terms;
};

std::vector<Example> examples() {
    return {
        {"exponential", WaitTimeDistribution::exponential(1.0), 1},
        {"alternating_poisson", WaitTimeDistribution::alternating_poisson(1.0), 4},
        {"bimodal_gaussian", WaitTimeDistribution::bimodal_gaussian_default(), 8},
        {"top_hat", WaitTimeDistribution::top_hat(1.0, 0.5), 8},
    };
}

Outcome exact_exponential() {
    Outcome o;
    const auto scan = renewal(WaitTimeDistribution::exponential(1.0), 1);
    o.check(scan.best_ks.statistic <= 1e-6, "KS " + g(scan.best_ks.statistic) + " > 1e-6");
    const double gamma = scan.best.terms.at(0).decay;
    const double dt = 1e-3;
    const auto model = build_unitary(scan.best, dt);
    double worst = 0.0;
    for (long long n : {0LL, 1LL, 10LL, 100LL, 1000LL}) {
        worst = std::max(worst, std::abs(model_survival(model, n) - std::exp(-2.0 * gamma * n * dt)));
    }
    o.check(worst <= 1e-10, "survival error " + g(worst));
    o.note("KS " + g(scan.best_ks.statistic) + ", survival error " + g(worst));
    return o;
}

Outcome unitarity_and_gram() {
    Outcome o;
    double worst_u = 0.0, worst_reset = 0.0, worst_herm = 0.0, lowest = 0.0;
    std::vector<std::string> constants;
    for (const auto &ex : examples()) {
        const ExpSum sum = renewal(ex.dist, ex.terms, kCoarseSamples).best;
        // Start where every |z_j| dt is small; coarser steps alias the
        // fast oscillations of the top-hat sum.
        double fastest = 0.0;
        for (const auto &t : sum.terms) fastest = std::max(fastest, std::abs(t.exponent()));
        const double dt0 = std::min(4e-3, 0.25 / fastest);
        std::vector<double> c;
        for (double dt : {dt0, dt0 / 2.0, dt0 / 4.0}) {
            const QuantumModel m = build_unitary(sum, dt);
            worst_u = std::max(worst_u, unitarity_defect(m.unitary));
            worst_reset = std::max(worst_reset, std::abs(m.reset.norm() - 1.0));
            const GramMatrix gm = gram_matrix(sum, dt);
            worst_herm = std::max(worst_herm, (gm.matrix - gm.matrix.adjoint()).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gm.matrix);
            lowest = std::min(lowest, es.eigenvalues().minCoeff() / gm.matrix.trace().real());
            double err = 0.0;
            for (double t : {0.05, 0.2, 0.5}) {
                const double phi = survival_tilde(sum, t);
                err = std::max(err, std::abs(memory_state(m, t).norm_squared - phi) / phi);
            }
            c.push_back(err / dt);
        }
        // Stable: C does not grow by more than 10% per halving.
        const bool stable = c[1] <= 1.1 * c[0] && c[2] <= 1.1 * c[1];
        o.check(stable, ex.name + " C grows: " + g(c[0]) + " " + g(c[1]) + " " + g(c[2]));
        constants.push_back(ex.name + " C=" + g(c[2]));
    }
    o.check(worst_u <= 1e-10, "unitarity " + g(worst_u));
    o.check(worst_reset <= 1e-12, "reset norm " + g(worst_reset));
    o.check(worst_herm <= 1e-12, "Gram not Hermitian " + g(worst_herm));
    o.check(lowest >= -1e-12, "Gram eigenvalue " + g(lowest));
    o.note("unitarity " + g(worst_u));
    for (const auto &s : constants) o.note(s);
    return o;
}

Outcome kernel_rank() {
    Outcome o;
    for (int n : {1, 2, 4, 8}) {
        const ExpSum sum = renewal(WaitTimeDistribution::alternating_poisson(1.0), n).best;
        const KernelSpectrum k = kernel_spectrum(sum, 400);
        const auto rank = k.rank(1e-8);
        o.check(rank <= static_cast<Eigen::Index>(sum.size()), "N=" + std::to_string(n) + " rank " + std::to_string(rank));
        o.check(std::abs(k.trace - 1.0) <= 1e-3, "N=" + std::to_string(n) + " trace " + g(k.trace));
        o.note("N=" + std::to_string(n) + " rank " + std::to_string(rank) + " trace " + g(k.trace));
    }
    return o;
}

Outcome alternating_poisson() {
    Outcome o;
    const auto dist = WaitTimeDistribution::alternating_poisson(1.0);
    const FitHyper hyper = fit_preset("desk");
    std::vector<double> quantum;
    std::map<int, double> classical;
    for (int dim : {2, 4, 8}) {
        quantum.push_back(renewal(dist, dim).best_ks.statistic);
        classical[dim] = fit_classical(dist, dim, hyper).ks;
        o.check(quantum.back() < classical[dim], "dim " + std::to_string(dim) + " quantum " + g(quantum.back()) +
                                                     " >= classical " + g(classical[dim]));
        o.note("dim " + std::to_string(dim) + " quantum " + g(quantum.back()) + " classical " + g(classical[dim]));
    }
    o.check(quantum[0] > quantum[1] && quantum[1] > quantum[2], "quantum KS not strictly decreasing");
    const double ratio = quantum[1] / classical[4];
    o.check(ratio <= 0.1, "dim 4 ratio " + g(ratio));
    o.note("dim 4 ratio " + g(ratio));
    return o;
}

Outcome bimodal_gaussian() {
    Outcome o;
    const auto dist = WaitTimeDistribution::bimodal_gaussian_default();
    const double k4 = renewal(dist, 4).best_ks.statistic;
    const double k8 = renewal(dist, 8).best_ks.statistic;
    o.check(k8 / k4 <= 0.1, "ratio " + g(k8 / k4));
    o.note("KS4 " + g(k4) + " KS8 " + g(k8) + " ratio " + g(k8 / k4));
    return o;
}

Outcome simulation() {
    Outcome o;
    const double dt = 1e-3;
    for (const auto &ex : examples()) {
        const ExpSum sum = renewal(ex.dist, ex.terms, kCoarseSamples).best;
        const QuantumModel m = build_unitary(sum, dt);
        const auto waits = sample_waits(m, 11, 100000, 8, 1'000'000'000);
        const SurvivalEvaluator surv(sum);
        const KsReport ks = ks_empirical(waits, dt, [&](double t) { return surv(t); });
        o.check(waits.size() == 100000u, ex.name + " short sample");
        o.check(ks.statistic <= 0.01, ex.name + " distance " + g(ks.statistic));
        o.note(ex.name + " " + g(ks.statistic));
    }
    return o;
}

Outcome hsmm_corners() {
    Outcome o;
    const int terms = 8;
    DecompositionCache cache(terms, default_eps_grid());
    CompressOptions copt;
    copt.cache = &cache;
    StationaryOptions st;
    st.initial = std::vector<double>{0.5, 0.5};
    const double ap = renewal(WaitTimeDistribution::alternating_poisson(1.0), terms).best_ks.statistic;
    const double bg = renewal(WaitTimeDistribution::bimodal_gaussian_default(), terms).best_ks.statistic;
    Eigen::Index max_dim = 0;
    for (double p : {0.0, 0.5, 1.0}) {
        for (double q : {0.0, 0.5, 1.0}) {
            const CompressedHsmm m = compress(example_process(p, q), terms, copt);
            max_dim = std::max(max_dim, m.dimension);
            const double ks = averaged_ks(m, st);
            if (p == 0.0 && q == 0.0) {
                o.check(std::abs(ks - ap) <= 1e-9, "(0,0) " + g(ks) + " vs " + g(ap));
            }
            if (p == 1.0 && q == 1.0) {
                o.check(std::abs(ks - bg) <= 1e-9, "(1,1) " + g(ks) + " vs " + g(bg));
            }
            o.check(ks >= std::min(ap, bg) - 1e-9 && ks <= std::max(ap, bg) + 1e-9,
                    "(" + g(p) + "," + g(q) + ") outside corner bounds");
            o.check(unitarity_defect(m.unitary) <= 1e-10, "unitarity at (" + g(p) + "," + g(q) + ")");
        }
    }
    o.check(max_dim <= 32, "memory dimension " + std::to_string(max_dim));
    o.note("corners " + g(ap) + " / " + g(bg) + ", max dimension " + std::to_string(max_dim));
    return o;
}

std::vector<std::vector<std::string>> csv_rows(const std::string &path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(tok);
        rows.push_back(row);
    }
    return rows;
}

Outcome top_hat() {
    Outcome o;
    ReproduceConfig c;
    c.figure = "fig6";
    c.out_dir = (std::filesystem::temp_directory_path() / "qcoarse_acceptance").string();
    reproduce(c);
    const auto dir = std::filesystem::path(c.out_dir) / "fig6";

    // ks.csv keeps each qubit series up to the first KS >= 0.45.
    std::map<int, std::map<int, double>> ks;  // [qubits][k]
    for (const auto &row : csv_rows((dir / "ks.csv").string())) {
        ks[std::stoi(row[0])][std::stoi(row[2])] = parse_double(row[4]);
    }
    for (const auto &[q, series] : ks) {
        double prev = -1.0;
        for (const auto &[k, v] : series) {
            o.check(v > prev, std::to_string(q) + " qubits: KS not increasing at k=" + std::to_string(k));
            prev = v;
        }
    }
    for (int k = 0; k < c.tophat_widths; ++k) {
        double prev = 2.0;
        for (const auto &[q, series] : ks) {
            const auto it = series.find(k);
            if (it == series.end()) continue;
            o.check(it->second < prev, "k=" + std::to_string(k) + ": KS not decreasing at " + std::to_string(q) + " qubits");
            prev = it->second;
        }
    }
    const auto classical = csv_rows((dir / "classical.csv").string());
    const double narrowest = parse_double(classical.back()[2]);
    o.check(narrowest >= 0.45, "classical dimension-1 KS at the narrowest width " + g(narrowest) + " < 0.45");
    std::string table;
    for (const auto &[q, series] : ks) {
        table += " q" + std::to_string(q) + ":";
        for (const auto &[k, v] : series) table += " " + g(v);
    }
    o.note("truncated KS" + table + "; classical narrowest " + g(narrowest));
    return o;
}

Outcome interference() {
    Outcome o;
    const auto table = interference_diagnostic(split_uniform_process(), 16);
    o.check(table.size() == 1u, "expected one shared pair, got " + std::to_string(table.size()));
    if (!table.empty()) {
        o.check(table[0].approx_density_overlap > 0.0, "approximate overlap " + g(table[0].approx_density_overlap));
        o.check(table[0].exact_density_overlap == 0.0, "exact overlap " + g(table[0].exact_density_overlap));
        o.note("approximate " + g(table[0].approx_density_overlap) + ", exact " + g(table[0].exact_density_overlap));
    }
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    struct Check {
        std::string name;
        std::function<Outcome()> run;
        double budget;  ///< seconds
    };
    const std::vector<Check> checks = {
        {"exact exponential representation", exact_exponential, 1.0},
        {"unitarity and Gram invariants", unitarity_and_gram, 10.0},
        {"kernel rank", kernel_rank, 30.0},
        {"alternating Poisson vs classical", alternating_poisson, 600.0},
        {"bimodal Gaussian qubit jump", bimodal_gaussian, 600.0},
        {"simulation consistency", simulation, 120.0},
        {"HSMM corner identities", hsmm_corners, 300.0},
        {"top-hat trends", top_hat, 900.0},
        {"interference diagnostic", interference, 60.0},
    };
    // Optional arguments select criteria by number.
    std::vector<bool> selected(checks.size(), argc < 2);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= static_cast<int>(checks.size())) selected[static_cast<std::size_t>(k - 1)] = true;
    }
    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        if (!selected[i]) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = checks[i].run();
        } catch (const std::exception &e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += out.pass ? 0 : 1;
        // Runtime budgets depend on the machine; overruns are reported, not failed.
        const std::string timing =
            g(secs) + " s of " + g(checks[i].budget) + " s" + (secs > checks[i].budget ? ", over budget" : "");
        std::printf("criterion %zu %s: %s (%s) %s\n", i + 1, checks[i].name.c_str(), out.pass ? "PASS" : "FAIL",
                    timing.c_str(), out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
