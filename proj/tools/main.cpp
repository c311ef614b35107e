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

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcoarse/classical.hpp"
#include "qcoarse/errors.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/linalg.hpp"
#include "qcoarse/parallel.hpp"
#include "qcoarse/processes.hpp"
#include "qcoarse/qmodel.hpp"
#include "qcoarse/reproduce.hpp"
#include "qcoarse/simulate.hpp"

namespace {

constexpr const char *kVersion = "qcoarse 0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Every flag the user could set, flattened into one string for stamping.
struct RunConfig {
    std::string command;
    std::string dist;
    std::string input;
    std::string out;
    std::string preset = "desk";
    int qubits = -1;
    int dim = -1;
    int terms = -1;
    double eps_min = 1e-12;
    double eps_max = 1e-1;
    int eps_count = 45;
    int samples = 1000;
    double dt = qcoarse::kDefaultTimestep;
    int grid = 11;
    std::uint64_t seed = 1;
    long long events = 100000;
    int points = 1000;
    std::string figure;

    std::string canonical() const {
        std::ostringstream s;
        s << "command=" << command << " dist=" << dist << " input=" << input << " preset=" << preset
          << " qubits=" << qubits << " dim=" << dim << " terms=" << terms
          << " eps_min=" << qcoarse::format_double(eps_min) << " eps_max=" << qcoarse::format_double(eps_max)
          << " eps_count=" << eps_count << " samples=" << samples << " dt=" << qcoarse::format_double(dt)
          << " grid=" << grid << " seed=" << seed << " events=" << events << " points=" << points
          << " figure=" << figure;
        return s.str();
    }

    void stamp(std::ostream &out) const {
        out << "# " << kVersion << "\n";
        out << "# config_hash=" << qcoarse::hex64(qcoarse::fnv1a(canonical())) << "\n";
        out << "# config " << canonical() << "\n";
    }

    // Dimension from --dim, --qubits (2^k) or --terms, in that order.
    int dimension() const {
        if (dim > 0) return dim;
        if (qubits >= 0) return 1 << qubits;
        if (terms > 0) return terms;
        throw qcoarse::InputError("one of --dim, --qubits or --terms is required");
    }
};

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw qcoarse::InputError("cannot open '" + path + "' for writing");
    }
    return out;
}

int cmd_decompose(const RunConfig &c) {
    const auto dist = qcoarse::parse_distribution(c.dist);
    qcoarse::ScanOptions opt;
    opt.samples = c.samples;
    const auto eps = qcoarse::log_grid(c.eps_min, c.eps_max, c.eps_count);
    const qcoarse::ScanResult scan = qcoarse::scan_epsilon(dist, c.dimension(), eps, opt);
    qcoarse::save_expsum(c.out, scan.best);
    {
        auto csv = open_out(c.out + ".scan.csv");
        c.stamp(csv);
        qcoarse::write_scan_report(csv, scan);
    }
    std::cout << "terms " << scan.best.terms.size() << "\n"
              << "eps " << qcoarse::format_double(scan.best_eps) << "\n"
              << "ks " << qcoarse::format_double(scan.best_ks.statistic) << "\n"
              << "domain " << qcoarse::format_double(scan.domain) << "\n"
              << "failed_eps " << scan.failures.size() << "\n";
    return 0;
}

int cmd_build(const RunConfig &c) {
    const qcoarse::ExpSum sum = qcoarse::load_expsum(c.input);
    const qcoarse::QuantumModel model = qcoarse::build_unitary(sum, c.dt);
    qcoarse::save_model(c.out, model);
    const double reset_norm = model.reset.norm();
    std::cout << "dimension " << model.dimension << "\n"
              << "generators " << model.generators.cols() << "\n"
              << "unitarity_residual " << qcoarse::format_double(qcoarse::unitarity_defect(model.unitary)) << "\n"
              << "reset_norm_defect " << qcoarse::format_double(std::abs(reset_norm - 1.0)) << "\n"
              << "eta " << qcoarse::format_double(model.eta) << "\n"
              << "model_hash " << qcoarse::hex64(qcoarse::model_hash(model)) << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig &c) {
    const qcoarse::QuantumModel model = qcoarse::load_model(c.input);
    const auto dist = qcoarse::parse_distribution(c.dist);
    const qcoarse::ExpSum &sum = model.source;
    const double T = sum.time_scale;
    const qcoarse::SurvivalEvaluator surv(sum);

    const qcoarse::KsReport ks_sum = qcoarse::ks_against(dist, sum);
    // Lattice comparison of the simulated survival against the exact one.
    const long long steps = static_cast<long long>(std::ceil(1.0 / model.dt));
    const std::vector<double> lattice = qcoarse::model_survival_curve(model, steps);
    double ks_model = 0.0;
    double at = 0.0;
    for (long long n = 0; n <= steps; ++n) {
        const double d = std::abs(lattice[static_cast<std::size_t>(n)] -
                                  qcoarse::survival(dist, static_cast<double>(n) * model.dt * T));
        if (d > ks_model) {
            ks_model = d;
            at = static_cast<double>(n) * model.dt * T;
        }
    }

    auto csv = open_out(c.out);
    c.stamp(csv);
    csv << "# time_scale=" << qcoarse::format_double(T) << "\n";
    csv << "t,phi,phi_tilde,Phi,Phi_tilde\n";
    for (int i = 0; i <= c.points; ++i) {
        const double u = static_cast<double>(i) / c.points;
        const double t = u * T;
        csv << qcoarse::format_double(t) << ',' << qcoarse::format_double(qcoarse::pdf(dist, t)) << ','
            << qcoarse::format_double(qcoarse::phi_tilde(sum, u) / T) << ','
            << qcoarse::format_double(qcoarse::survival(dist, t)) << ',' << qcoarse::format_double(surv(u)) << '\n';
    }
    std::cout << "ks " << qcoarse::format_double(ks_sum.statistic) << "\n"
              << "ks_argmax " << qcoarse::format_double(ks_sum.argmax * T) << "\n"
              << "ks_lattice " << qcoarse::format_double(ks_model) << "\n"
              << "ks_lattice_argmax " << qcoarse::format_double(at) << "\n";
    return 0;
}

int cmd_classical(const RunConfig &c) {
    const auto dist = qcoarse::parse_distribution(c.dist);
    qcoarse::FitHyper hyper = qcoarse::fit_preset(c.preset);
    hyper.rng_seed = c.seed;
    const qcoarse::ClassicalFit fit = qcoarse::fit_classical(dist, c.dimension(), hyper);
    auto csv = open_out(c.out);
    c.stamp(csv);
    csv << "# domain=" << qcoarse::format_double(fit.domain) << "\n";
    qcoarse::write_fit_report(csv, fit);
    std::cout << "ks " << qcoarse::format_double(fit.ks) << "\n"
              << "loop " << fit.loop << "\n"
              << "seed " << fit.seed << "\n"
              << "dt " << qcoarse::format_double(fit.model.dt * fit.domain) << "\n";
    return 0;
}

int cmd_simulate(const RunConfig &c) {
    const qcoarse::QuantumModel model = qcoarse::load_model(c.input);
    const std::vector<long long> waits = qcoarse::sample_waits(model, c.seed, c.events);
    {
        auto out = open_out(c.out);
        c.stamp(out);
        qcoarse::write_waits(out, waits, c.seed, model.dt, qcoarse::model_hash(model));
    }
    const qcoarse::SurvivalEvaluator surv(model.source);
    const qcoarse::KsReport ks = qcoarse::ks_empirical(waits, model.dt, [&](double u) { return surv(u); });
    std::cout << "samples " << waits.size() << "\n"
              << "ks_empirical " << qcoarse::format_double(ks.statistic) << "\n"
              << "ks_argmax " << qcoarse::format_double(ks.argmax) << "\n";
    if (!c.dist.empty()) {
        const auto dist = qcoarse::parse_distribution(c.dist);
        const double T = model.source.time_scale;
        const qcoarse::KsReport exact = qcoarse::ks_empirical(
            waits, model.dt, [&](double u) { return qcoarse::survival(dist, u * T); });
        std::cout << "ks_exact " << qcoarse::format_double(exact.statistic) << "\n";
    }
    return 0;
}

int cmd_reproduce(const RunConfig &c) {
    qcoarse::ReproduceConfig r;
    r.figure = c.figure;
    r.out_dir = c.out;
    r.preset = c.preset;
    r.seed = c.seed;
    r.samples = c.samples;
    r.eps_min = c.eps_min;
    r.eps_max = c.eps_max;
    r.eps_count = c.eps_count;
    r.grid = c.grid;
    if (c.terms > 0) r.terms = c.terms;
    r.curve_points = c.points;
    for (const std::string &f : qcoarse::reproduce(r)) {
        std::cout << f << "\n";
    }
    return 0;
}

void add_eps(CLI::App *app, RunConfig &c) {
    app->add_option("--eps-min", c.eps_min, "smallest precision target")->check(CLI::PositiveNumber);
    app->add_option("--eps-max", c.eps_max, "largest precision target")->check(CLI::PositiveNumber);
    app->add_option("--eps-count", c.eps_count, "log-spaced precision targets")->check(CLI::PositiveNumber);
    app->add_option("--samples", c.samples, "even number of grid intervals M")->check(CLI::PositiveNumber);
}

void add_size(CLI::App *app, RunConfig &c) {
    auto *q = app->add_option("--qubits", c.qubits, "memory qubits k, dimension 2^k")->check(CLI::Range(0, 20));
    auto *d = app->add_option("--dim", c.dim, "memory dimension")->check(CLI::PositiveNumber);
    q->excludes(d);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum coarse-graining of renewal and semi-Markov processes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig c;

    auto *decompose = app.add_subcommand("decompose", "fit an exponential sum to a wait-time density");
    decompose->add_option("--dist", c.dist, "distribution spec")->required();
    add_size(decompose, c);
    decompose->add_option("--terms", c.terms, "number of exponential terms")->check(CLI::PositiveNumber);
    add_eps(decompose, c);
    decompose->add_option("--out", c.out, "exponential-sum file (scan CSV goes to <out>.scan.csv)")->required();

    auto *build = app.add_subcommand("build", "build the unitary memory model from an exponential sum");
    build->add_option("--expsum", c.input, "exponential-sum file")->required()->check(CLI::ExistingFile);
    build->add_option("--dt", c.dt, "timestep on the unit domain")->check(CLI::PositiveNumber);
    build->add_option("--out", c.out, "model artifact")->required();

    auto *evaluate = app.add_subcommand("evaluate", "compare a model against a distribution");
    evaluate->add_option("--model", c.input, "model artifact")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--dist", c.dist, "distribution spec")->required();
    evaluate->add_option("--points", c.points, "curve intervals")->check(CLI::PositiveNumber);
    evaluate->add_option("--out", c.out, "curve CSV")->required();

    auto *classical = app.add_subcommand("classical", "fit the classical counter baseline");
    classical->add_option("--dist", c.dist, "distribution spec")->required();
    add_size(classical, c);
    classical->add_option("--preset", c.preset, "desk, paper, bimodal-warmup or bimodal-warmup-paper");
    classical->add_option("--seed", c.seed, "RNG seed");
    classical->add_option("--out", c.out, "fit report CSV")->required();

    auto *simulate = app.add_subcommand("simulate", "sample waits from a model");
    simulate->add_option("--model", c.input, "model artifact")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", c.seed, "first trajectory seed");
    simulate->add_option("--events", c.events, "number of waits")->check(CLI::PositiveNumber);
    simulate->add_option("--dist", c.dist, "also compare against this distribution");
    simulate->add_option("--out", c.out, "wait-sample file")->required();

    auto *reproduce = app.add_subcommand("reproduce", "write the data series behind a figure");
    reproduce->add_option("figure", c.figure, "fig2, fig3, fig4b, fig6 or fig7")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(qcoarse::kFigureIds), std::end(qcoarse::kFigureIds))));
    reproduce->add_option("--preset", c.preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    reproduce->add_option("--seed", c.seed, "classical fit seed");
    reproduce->add_option("--grid", c.grid, "points per side of the (p, q) grid")->check(CLI::Range(2, 1001));
    reproduce->add_option("--terms", c.terms, "terms per dwell for fig4b")->check(CLI::PositiveNumber);
    reproduce->add_option("--points", c.points, "curve intervals")->check(CLI::PositiveNumber);
    add_eps(reproduce, c);
    reproduce->add_option("--out", c.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (decompose->parsed()) {
            c.command = "decompose";
            return cmd_decompose(c);
        }
        if (build->parsed()) {
            c.command = "build";
            return cmd_build(c);
        }
        if (evaluate->parsed()) {
            c.command = "evaluate";
            return cmd_evaluate(c);
        }
        if (classical->parsed()) {
            c.command = "classical";
            return cmd_classical(c);
        }
        if (simulate->parsed()) {
            c.command = "simulate";
            return cmd_simulate(c);
        }
        c.command = "reproduce";
        return cmd_reproduce(c);
    } catch (const qcoarse::NumericalFailure &e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual << ")\n";
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
