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

#include "qcoarse/reproduce.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qcoarse/classical.hpp"
#include "qcoarse/errors.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/hsmm.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/parallel.hpp"

namespace qcoarse {

namespace {

constexpr double kTopHatCutoff = 0.45;

class CsvFile {
public:
    CsvFile(const ReproduceConfig &config, const std::string &name, const std::string &note)
        : path_((std::filesystem::path(config.out_dir) / config.figure / name).string()) {
        std::filesystem::create_directories(std::filesystem::path(path_).parent_path());
        out_.open(path_);
        if (!out_) {
            throw InputError("cannot open '" + path_ + "' for writing");
        }
        out_ << "# qcoarse " << config.figure << " " << name << "\n";
        out_ << "# config_hash=" << hex64(fnv1a(config.canonical())) << "\n";
        out_ << "# config " << config.canonical() << "\n";
        if (!note.empty()) {
            out_ << "# " << note << "\n";
        }
    }
    std::ofstream &stream() {
        return out_;
    }
    const std::string &path() const {
        return path_;
    }

private:
    std::string path_;
    std::ofstream out_;
};

std::vector<double> eps_grid(const ReproduceConfig &c) {
    return log_grid(c.eps_min, c.eps_max, c.eps_count);
}

std::string f(double v) {
    return format_double(v);
}

struct RenewalSeries {
    std::vector<int> dims;
    std::vector<ScanResult> scans;
};

RenewalSeries renewal_scans(const WaitTimeDistribution &dist, const std::vector<int> &dims,
                            const std::vector<double> &eps, const ScanOptions &options) {
    RenewalSeries out;
    out.dims = dims;
    HankelDecomposer dec = make_decomposer(dist, options);
    for (int n : dims) {
        out.scans.push_back(scan_epsilon(dec, dist, n, eps));
    }
    return out;
}

void write_curves(CsvFile &csv, const WaitTimeDistribution &dist, const RenewalSeries &series, int points,
                  double span) {
    auto &o = csv.stream();
    o << "t,phi,Phi";
    for (int n : series.dims) {
        o << ",phi_tilde_d" << n << ",Phi_tilde_d" << n;
    }
    o << "\n";
    std::vector<SurvivalEvaluator> surv;
    for (const auto &s : series.scans) {
        surv.emplace_back(s.best);
    }
    for (int i = 0; i <= points; ++i) {
        const double t = span * i / points;
        o << f(t) << ',' << f(pdf(dist, t)) << ',' << f(survival(dist, t));
        for (std::size_t k = 0; k < series.scans.size(); ++k) {
            const ExpSum &sum = series.scans[k].best;
            const double T = sum.time_scale;
            o << ',' << f(phi_tilde(sum, t / T) / T) << ',' << f(surv[k](t / T));
        }
        o << "\n";
    }
}

void write_scan_table(CsvFile &csv, const RenewalSeries &series) {
    auto &o = csv.stream();
    o << "dimension,eps,ks,terms,truncated_weight\n";
    for (std::size_t k = 0; k < series.scans.size(); ++k) {
        for (const auto &e : series.scans[k].report) {
            o << series.dims[k] << ',' << f(e.eps) << ',' << f(e.ks) << ',' << e.terms << ','
              << f(e.truncated_weight) << "\n";
        }
    }
}

std::vector<std::string> renewal_figure(const ReproduceConfig &c, const WaitTimeDistribution &dist,
                                        const std::string &fit_preset_name) {
    const std::vector<int> dims = {2, 4, 8};
    ScanOptions opt;
    opt.samples = c.samples;
    const RenewalSeries series = renewal_scans(dist, dims, eps_grid(c), opt);
    std::vector<std::string> files;

    FitHyper hyper = fit_preset(fit_preset_name);
    hyper.rng_seed = c.seed;
    std::vector<ClassicalFit> fits;
    for (int d : dims) {
        fits.push_back(fit_classical(dist, d, hyper));
    }
    const MemorylessFit memoryless = fit_memoryless(dist);

    {
        CsvFile csv(c, "ks.csv", "quantum dimension = 2^qubits; classical fit preset " + fit_preset_name);
        auto &o = csv.stream();
        o << "dimension,qubits,quantum_ks,best_eps,classical_ks,classical_loop,classical_dt,memoryless_ks\n";
        for (std::size_t k = 0; k < dims.size(); ++k) {
            o << dims[k] << ',' << static_cast<int>(std::log2(dims[k])) << ',' << f(series.scans[k].best_ks.statistic)
              << ',' << f(series.scans[k].best_eps) << ',' << f(fits[k].ks) << ',' << fits[k].loop << ','
              << f(fits[k].model.dt) << ',' << f(memoryless.ks.statistic) << "\n";
        }
        files.push_back(csv.path());
    }
    {
        CsvFile csv(c, "curves.csv", "time in the distribution's own units");
        write_curves(csv, dist, series, c.curve_points, series.scans.front().domain);
        files.push_back(csv.path());
    }
    {
        CsvFile csv(c, "scan.csv", "");
        write_scan_table(csv, series);
        files.push_back(csv.path());
    }
    {
        CsvFile csv(c, "expsums.txt", "one exponential sum per dimension, unit domain");
        for (std::size_t k = 0; k < dims.size(); ++k) {
            csv.stream() << "# dimension " << dims[k] << "\n";
            write_expsum(csv.stream(), series.scans[k].best);
        }
        files.push_back(csv.path());
    }
    return files;
}

std::vector<std::string> fig4b(const ReproduceConfig &c) {
    if (c.grid < 2) {
        throw DomainError("fig4b grid needs at least 2 points per side");
    }
    ScanOptions opt;
    opt.samples = c.samples;
    DecompositionCache cache(c.terms, eps_grid(c), opt);
    StationaryOptions st;
    st.initial = std::vector<double>{0.5, 0.5};
    const double ap_ks = cache.get(example_process(0.0, 0.0).edges.front().dwell).best_ks.statistic;
    const double bg_ks = cache.get(example_process(1.0, 1.0).edges.front().dwell).best_ks.statistic;

    CsvFile csv(c, "heat.csv",
                "averaged KS over events; renewal KS alternating_poisson=" + f(ap_ks) +
                    " bimodal_gaussian=" + f(bg_ks) + "; chains with two closed classes weighted from (1/2, 1/2)");
    auto &o = csv.stream();
    o << "p,q,averaged_ks,memory_dimension,generators\n";
    CompressOptions copt;
    copt.eps_list = eps_grid(c);
    copt.scan = opt;
    copt.cache = &cache;
    for (int i = 0; i < c.grid; ++i) {
        for (int j = 0; j < c.grid; ++j) {
            const double p = static_cast<double>(i) / (c.grid - 1);
            const double q = static_cast<double>(j) / (c.grid - 1);
            const Hsmm h = example_process(p, q);
            const CompressedHsmm model = compress(h, c.terms, copt);
            o << f(p) << ',' << f(q) << ',' << f(averaged_ks(model, st)) << ',' << model.dimension << ','
              << model.generator_count << "\n";
        }
    }
    return {csv.path()};
}

struct TopHatStudy {
    std::vector<double> widths;
    std::vector<int> qubits;
    // [width][qubit]
    std::vector<std::vector<ScanResult>> scans;
};

TopHatStudy tophat_study(const ReproduceConfig &c, const std::vector<int> &qubits) {
    TopHatStudy study;
    study.qubits = qubits;
    const double tau = static_cast<double>(c.tophat_edge_index) / c.tophat_samples;
    ScanOptions opt;
    opt.samples = c.tophat_samples;
    opt.domain = 1.0;
    const std::vector<double> eps = wide_eps_grid();
    for (int k = 0; k < c.tophat_widths; ++k) {
        const double width = tau * std::ldexp(1.0, -k);
        study.widths.push_back(width);
        const auto dist = WaitTimeDistribution::top_hat(tau, width);
        HankelDecomposer dec = make_decomposer(dist, opt);
        std::vector<ScanResult> row;
        for (int q : qubits) {
            row.push_back(scan_epsilon(dec, dist, 1 << q, eps));
        }
        study.scans.push_back(std::move(row));
    }
    return study;
}

std::string tophat_note(const ReproduceConfig &c) {
    return "top-hat edge tau = " + std::to_string(c.tophat_edge_index) + "/" + std::to_string(c.tophat_samples) +
           " on the unit window, widths tau * 2^-k, precision grid 1e-3..1e2";
}

std::vector<std::string> fig6(const ReproduceConfig &c) {
    const TopHatStudy study = tophat_study(c, {1, 2, 3, 4});
    std::vector<std::string> files;
    {
        CsvFile csv(c, "ks.csv", tophat_note(c) + "; each qubit series stops at the first KS >= 0.45");
        auto &o = csv.stream();
        o << "qubits,dimension,k,width,ks,best_eps\n";
        for (std::size_t qi = 0; qi < study.qubits.size(); ++qi) {
            for (std::size_t k = 0; k < study.widths.size(); ++k) {
                const ScanResult &r = study.scans[k][qi];
                if (r.best_ks.statistic >= kTopHatCutoff) break;
                o << study.qubits[qi] << ',' << (1 << study.qubits[qi]) << ',' << k << ',' << f(study.widths[k]) << ','
                  << f(r.best_ks.statistic) << ',' << f(r.best_eps) << "\n";
            }
        }
        files.push_back(csv.path());
    }
    {
        CsvFile csv(c, "ks_full.csv", tophat_note(c) + "; untruncated");
        auto &o = csv.stream();
        o << "qubits,dimension,k,width,ks,best_eps\n";
        for (std::size_t qi = 0; qi < study.qubits.size(); ++qi) {
            for (std::size_t k = 0; k < study.widths.size(); ++k) {
                const ScanResult &r = study.scans[k][qi];
                o << study.qubits[qi] << ',' << (1 << study.qubits[qi]) << ',' << k << ',' << f(study.widths[k]) << ','
                  << f(r.best_ks.statistic) << ',' << f(r.best_eps) << "\n";
            }
        }
        files.push_back(csv.path());
    }
    {
        FitHyper hyper = fit_preset(c.preset == "paper" ? "paper" : "desk");
        hyper.rng_seed = c.seed;
        const double tau = static_cast<double>(c.tophat_edge_index) / c.tophat_samples;
        CsvFile csv(c, "classical.csv", tophat_note(c) + "; single-state counter fits");
        auto &o = csv.stream();
        o << "k,width,classical_ks_dim1,memoryless_ks\n";
        for (std::size_t k = 0; k < study.widths.size(); ++k) {
            const auto dist = WaitTimeDistribution::top_hat(tau, study.widths[k]);
            const ClassicalFit fit = fit_classical(dist, 1, hyper, 1.0);
            o << k << ',' << f(study.widths[k]) << ',' << f(fit.ks) << ',' << f(fit_memoryless(dist, 1.0).ks.statistic)
              << "\n";
        }
        files.push_back(csv.path());
    }
    return files;
}

std::vector<std::string> fig7(const ReproduceConfig &c) {
    const TopHatStudy study = tophat_study(c, {4});
    const double tau = static_cast<double>(c.tophat_edge_index) / c.tophat_samples;
    std::vector<std::string> files;
    for (std::size_t k = 0; k < study.widths.size(); ++k) {
        const auto dist = WaitTimeDistribution::top_hat(tau, study.widths[k]);
        RenewalSeries series;
        series.dims = {16};
        series.scans = {study.scans[k][0]};
        CsvFile csv(c, "curves_k" + std::to_string(k) + ".csv",
                    tophat_note(c) + "; four-qubit model, width " + f(study.widths[k]));
        write_curves(csv, dist, series, c.curve_points, 2.0 * tau);
        files.push_back(csv.path());
    }
    return files;
}

}  // namespace

std::string ReproduceConfig::canonical() const {
    std::ostringstream s;
    s << "figure=" << figure << " preset=" << preset << " seed=" << seed << " samples=" << samples
      << " eps_min=" << format_double(eps_min) << " eps_max=" << format_double(eps_max) << " eps_count=" << eps_count
      << " terms=" << terms << " grid=" << grid << " tophat_samples=" << tophat_samples
      << " tophat_edge_index=" << tophat_edge_index << " tophat_widths=" << tophat_widths
      << " curve_points=" << curve_points;
    return s.str();
}

std::vector<std::string> reproduce(const ReproduceConfig &config) {
    if (config.preset != "desk" && config.preset != "paper") {
        throw InputError("preset must be 'desk' or 'paper'");
    }
    const bool paper = config.preset == "paper";
    if (config.figure == "fig2") {
        return renewal_figure(config, WaitTimeDistribution::alternating_poisson(1.0), paper ? "paper" : "desk");
    }
    if (config.figure == "fig3") {
        return renewal_figure(config, WaitTimeDistribution::bimodal_gaussian_default(),
                              paper ? "bimodal-warmup-paper" : "bimodal-warmup");
    }
    if (config.figure == "fig4b") {
        return fig4b(config);
    }
    if (config.figure == "fig6") {
        return fig6(config);
    }
    if (config.figure == "fig7") {
        return fig7(config);
    }
    throw InputError("unknown figure '" + config.figure + "' (expected fig2, fig3, fig4b, fig6 or fig7)");
}

}  // namespace qcoarse
