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

#include "qcoarse/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qcoarse/errors.hpp"
#include "qcoarse/parallel.hpp"

namespace qcoarse {

void ClassicalCounterModel::validate() const {
    if (p.empty()) {
        throw DomainError("counter needs at least one state");
    }
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("counter probabilities must lie in [0, 1]");
        }
    }
    if (!(dt > 0.0)) {
        throw DomainError("counter timestep must be positive");
    }
    if (loop < 0 || loop >= dimension()) {
        throw DomainError("loop target outside the counter");
    }
}

DiscretePmf classical_wait_pmf(const ClassicalCounterModel &model, long long max_steps) {
    model.validate();
    if (max_steps < 1) {
        throw DomainError("max_steps must be at least 1");
    }
    if (std::all_of(model.p.begin(), model.p.end(), [](double v) { return v == 0.0; })) {
        throw DomainError("counter with all emission probabilities zero never fires");
    }
    DiscretePmf out;
    out.step = model.dt;
    out.mass.reserve(static_cast<std::size_t>(std::min<long long>(max_steps, 1 << 20)));
    const int last = model.dimension() - 1;
    double alive = 1.0;
    int s = 0;
    for (long long n = 1; n <= max_steps; ++n) {
        const double q = alive * model.p[static_cast<std::size_t>(s)];
        out.mass.push_back(q);
        alive -= q;
        s = s == last ? model.loop : s + 1;
        if (alive <= 0.0) {
            alive = 0.0;
            break;
        }
    }
    out.residual = alive;
    return out;
}

FitHyper fit_preset(const std::string &name) {
    FitHyper h;
    if (name == "desk") {
        return h;
    }
    if (name == "paper") {
        h.seeds = 1000;
        h.steps_per_state = 12500;
        return h;
    }
    if (name == "bimodal-warmup" || name == "bimodal-warmup-paper") {
        h.steps_per_state = 6250;
        h.warmup_per_state = 1250;
        h.warmup_factor = 10.0;
        h.seeds = name == "bimodal-warmup" ? 50 : 1000;
        return h;
    }
    throw InputError("unknown hyperparameter preset '" + name + "'");
}

namespace {

// CDF of the source law on the unit domain, tabulated on `grid` intervals of
// [0, 1] and linearly interpolated; 1 beyond the window.
class CdfTable {
public:
    CdfTable(const WaitTimeDistribution &dist, double domain, int grid) : values_(static_cast<std::size_t>(grid) + 1) {
        for (int i = 0; i <= grid; ++i) {
            values_[static_cast<std::size_t>(i)] = cdf(dist, domain * i / grid);
        }
        scale_ = grid;
    }
    double operator()(double s) const {
        const double x = s * scale_;
        if (x >= scale_) {
            return values_.back();
        }
        const auto i = static_cast<std::size_t>(x);
        const double f = x - static_cast<double>(i);
        return values_[i] + f * (values_[i + 1] - values_[i]);
    }

private:
    std::vector<double> values_;
    double scale_;
};

// sup_t |C_p - C_q| evaluated on both sides of every atom inside the table
// window; past the window C_p is taken as its end value and the remaining
// supremum is the undelivered mass.
double objective(const CdfTable &cp, const std::vector<double> &p, double dt, int loop) {
    const int last = static_cast<int>(p.size()) - 1;
    double alive = 1.0;
    double best = 0.0;
    int s = 0;
    for (long long n = 1;; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (t > 1.0) {
            best = std::max(best, std::abs(cp(t) - (1.0 - alive)));
            break;
        }
        const double c = cp(t);
        best = std::max(best, std::abs(c - (1.0 - alive)));
        alive -= alive * p[static_cast<std::size_t>(s)];
        best = std::max(best, std::abs(c - (1.0 - alive)));
        if (alive < 1e-15) {
            break;
        }
        s = s == last ? loop : s + 1;
    }
    return best;
}

FitRun descend(const CdfTable &table, int dimension, int loop, int seed_index, double init_dt,
               const FitHyper &hyper) {
    std::seed_seq seq{static_cast<std::uint32_t>(hyper.rng_seed), static_cast<std::uint32_t>(hyper.rng_seed >> 32),
                      static_cast<std::uint32_t>(loop), static_cast<std::uint32_t>(seed_index)};
    std::mt19937_64 rng(seq);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::vector<double> p(static_cast<std::size_t>(dimension));
    for (double &v : p) {
        v = uniform();
    }
    double u = uniform();
    while (u == 0.0) {
        u = uniform();
    }
    double dt = std::max(-std::log(u) * init_dt, hyper.min_dt);

    FitRun run;
    run.loop = loop;
    run.seed = seed_index;
    run.ks = std::numeric_limits<double>::infinity();
    const long long steps = static_cast<long long>(hyper.steps_per_state) * dimension;
    const long long warm = static_cast<long long>(hyper.warmup_per_state) * dimension;
    if (hyper.keep_trace) {
        run.trace.reserve(static_cast<std::size_t>(steps) + 1);
    }
    std::vector<double> grad(p.size());
    auto accept = [&](double value) {
        if (value < run.ks) {
            run.ks = value;
            run.model.p = p;
            run.model.dt = dt;
            run.model.loop = loop;
        }
        if (hyper.keep_trace) {
            run.trace.push_back(run.ks);
        }
    };
    for (long long step = 0; step < steps; ++step) {
        const double base = objective(table, p, dt, loop);
        accept(base);
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double keep = p[j];
            const double h = keep + hyper.dp <= 1.0 ? hyper.dp : -hyper.dp;
            p[j] = keep + h;
            grad[j] = (objective(table, p, dt, loop) - base) / h;
            p[j] = keep;
        }
        const double gt = (objective(table, p, dt + hyper.dt_fd, loop) - base) / hyper.dt_fd;
        const double boost = step < warm ? hyper.warmup_factor : 1.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] = std::clamp(p[j] - boost * hyper.eta_p * grad[j], 0.0, 1.0);
        }
        dt = std::max(dt - boost * hyper.eta_t * gt, hyper.min_dt);
    }
    accept(objective(table, p, dt, loop));
    return run;
}

}  // namespace

double counter_ks(const WaitTimeDistribution &dist, double domain, const ClassicalCounterModel &model) {
    model.validate();
    const long long steps = static_cast<long long>(std::ceil(1.0 / model.dt)) + 1;
    const DiscretePmf pmf = classical_wait_pmf(model, std::max<long long>(steps, 1));
    return ks_continuous_discrete([&](double s) { return cdf(dist, domain * s); }, pmf).statistic;
}

ClassicalFit fit_classical(const WaitTimeDistribution &dist, int dimension, const FitHyper &hyper, double domain) {
    if (dimension < 1) {
        throw DomainError("dimension must be at least 1");
    }
    if (hyper.seeds < 1 || hyper.steps_per_state < 0 || hyper.grid < 1) {
        throw DomainError("invalid fit hyperparameters");
    }
    if (domain <= 0.0) {
        domain = default_domain(dist);
    }
    const CdfTable table(dist, domain, hyper.grid);
    const double init_dt = mean_wait(dist) / domain / dimension;

    const auto jobs = static_cast<std::size_t>(dimension) * static_cast<std::size_t>(hyper.seeds);
    std::vector<FitRun> runs(jobs);
    parallel_for(jobs, [&](std::size_t i) {
        const int loop = static_cast<int>(i / static_cast<std::size_t>(hyper.seeds));
        const int seed = static_cast<int>(i % static_cast<std::size_t>(hyper.seeds));
        runs[i] = descend(table, dimension, loop, seed, init_dt, hyper);
    });

    ClassicalFit fit;
    fit.domain = domain;
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].ks < runs[best].ks) {
            best = i;
        }
    }
    fit.model = runs[best].model;
    fit.ks = runs[best].ks;
    fit.loop = runs[best].loop;
    fit.seed = runs[best].seed;
    fit.runs = std::move(runs);
    return fit;
}

MemorylessFit fit_memoryless(const WaitTimeDistribution &dist, double domain) {
    if (domain <= 0.0) {
        domain = default_domain(dist);
    }
    auto score = [&](double log_rate) {
        const double rate = std::exp(log_rate);
        return ks_survival([&](double s) { return survival(dist, domain * s); },
                           [rate](double s) { return std::exp(-rate * s); });
    };
    const double lo = std::log(1e-2), hi = std::log(1e4);
    constexpr int coarse = 120;
    double best_x = lo;
    double best = score(lo).statistic;
    for (int i = 1; i <= coarse; ++i) {
        const double x = lo + (hi - lo) * i / coarse;
        const double v = score(x).statistic;
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    // Golden-section refinement inside the neighbouring coarse cells.
    const double step = (hi - lo) / coarse;
    double a = best_x - step, b = best_x + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = score(c).statistic, fd = score(d).statistic;
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = score(c).statistic;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = score(d).statistic;
        }
    }
    const double x = fc < fd ? c : d;
    MemorylessFit out;
    out.rate = std::exp(x);
    out.ks = score(x);
    if (out.ks.statistic > best) {
        out.rate = std::exp(best_x);
        out.ks = score(best_x);
    }
    return out;
}

}  // namespace qcoarse
