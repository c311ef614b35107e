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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcoarse/classical.hpp"
#include "qcoarse/errors.hpp"
#include "qcoarse/expsum.hpp"

namespace {

using qcoarse::ClassicalCounterModel;

// Direct propagation of the state occupation vector, one step at a time.
std::vector<double> brute_force_pmf(const ClassicalCounterModel &m, int steps) {
    const int n = m.dimension();
    std::vector<double> occ(n, 0.0), out;
    occ[0] = 1.0;
    for (int k = 0; k < steps; ++k) {
        std::vector<double> next(n, 0.0);
        double fire = 0.0;
        for (int s = 0; s < n; ++s) {
            fire += occ[s] * m.p[s];
            const int to = s + 1 < n ? s + 1 : m.loop;
            next[to] += occ[s] * (1.0 - m.p[s]);
        }
        out.push_back(fire);
        occ = next;
    }
    return out;
}

// KS between F(s) = 1 - exp(-rate s) and a geometric law on the lattice dt.
double geometric_ks(double rate, double q, double dt) {
    double worst = 0.0, below = 0.0, alive = 1.0;
    for (int n = 1; n < 200000 && alive > 1e-14; ++n) {
        const double f = 1.0 - std::exp(-rate * n * dt);
        const double above = below + alive * q;
        worst = std::max({worst, std::abs(f - below), std::abs(f - above)});
        below = above;
        alive *= 1.0 - q;
    }
    return worst;
}

qcoarse::FitHyper quick(int seeds = 10) {
    auto h = qcoarse::fit_preset("desk");
    h.seeds = seeds;
    return h;
}

TEST(CounterPmf, SingleStateIsGeometric) {
    ClassicalCounterModel m{{0.3}, 0.5, 0};
    const auto pmf = qcoarse::classical_wait_pmf(m, 50);
    EXPECT_EQ(pmf.step, 0.5);
    for (int n = 1; n <= 50; ++n) EXPECT_NEAR(pmf.mass[n - 1], 0.3 * std::pow(0.7, n - 1), 1e-15);
}

TEST(CounterPmf, CertainFirstStepIsPointMass) {
    ClassicalCounterModel m{{1.0, 0.2, 0.5}, 0.1, 1};
    const auto pmf = qcoarse::classical_wait_pmf(m, 10);
    EXPECT_EQ(pmf.mass[0], 1.0);
    for (std::size_t i = 1; i < pmf.mass.size(); ++i) EXPECT_EQ(pmf.mass[i], 0.0);
}

TEST(CounterPmf, MassBalancesAndMatchesPropagation) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 6;
        ClassicalCounterModel m;
        for (int j = 0; j < n; ++j) m.p.push_back(u(rng) * u(rng));
        m.dt = 0.01;
        m.loop = static_cast<int>(u(rng) * n);
        const auto pmf = qcoarse::classical_wait_pmf(m, 300);
        double total = pmf.residual;
        for (double v : pmf.mass) total += v;
        EXPECT_NEAR(total, 1.0, 1e-12);
        const auto ref = brute_force_pmf(m, 300);
        for (std::size_t k = 0; k < pmf.mass.size(); ++k) EXPECT_NEAR(pmf.mass[k], ref[k], 1e-14);
    }
}

TEST(CounterPmf, RejectsSilentCounter) {
    ClassicalCounterModel m{{0.0, 0.0}, 0.1, 0};
    EXPECT_THROW(qcoarse::classical_wait_pmf(m, 10), qcoarse::DomainError);
    ClassicalCounterModel bad{{0.5}, 0.1, 1};
    EXPECT_THROW(bad.validate(), qcoarse::DomainError);
}

TEST(CounterKs, MatchesIndependentGeometricKs) {
    const auto dist = qcoarse::WaitTimeDistribution::exponential(1.0);
    const double domain = 10.0;
    for (double q : {0.05, 0.2, 0.6}) {
        for (double dt : {0.002, 0.01, 0.05}) {
            ClassicalCounterModel m{{q}, dt, 0};
            EXPECT_NEAR(qcoarse::counter_ks(dist, domain, m), geometric_ks(domain, q, dt), 1e-6)
                << "q=" << q << " dt=" << dt;
        }
    }
}

TEST(FitClassical, ExponentialNearGeometricOptimum) {
    const auto dist = qcoarse::WaitTimeDistribution::exponential(1.0);
    const double domain = qcoarse::default_domain(dist);
    // With the default rates the timestep barely moves from its random
    // start; larger rates let the descent itself reach the optimum.
    auto hyper = quick();
    hyper.eta_p = 1e-3;
    hyper.eta_t = 1e-6;
    double oracle = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double dt = hyper.min_dt * std::pow(1.05, i);
        // the best q for a given dt sits near 1 - exp(-rate dt)
        const double q0 = 1.0 - std::exp(-domain * dt);
        for (int k = -20; k <= 20; ++k) {
            const double q = std::clamp(q0 * (1.0 + 0.05 * k), 1e-9, 1.0);
            oracle = std::min(oracle, geometric_ks(domain, q, dt));
        }
    }
    const auto fit = qcoarse::fit_classical(dist, 1, hyper);
    EXPECT_LE(fit.ks, 2.0 * oracle);
    // the discretization floor of the fitted lattice
    EXPECT_LE(fit.ks, domain * fit.model.dt);
}

TEST(FitClassical, DeterministicForSeed) {
    const auto dist = qcoarse::WaitTimeDistribution::alternating_poisson(1.0);
    const auto a = qcoarse::fit_classical(dist, 2, quick(4));
    const auto b = qcoarse::fit_classical(dist, 2, quick(4));
    EXPECT_EQ(a.ks, b.ks);
    EXPECT_EQ(a.model.p, b.model.p);
    EXPECT_EQ(a.model.dt, b.model.dt);
    auto other = quick(4);
    other.rng_seed = 99;
    EXPECT_NE(qcoarse::fit_classical(dist, 2, other).model.p, a.model.p);
}

TEST(FitClassical, TraceMonotoneAndConstraintsHold) {
    auto h = quick(3);
    h.keep_trace = true;
    const auto fit = qcoarse::fit_classical(qcoarse::WaitTimeDistribution::bimodal_gaussian_default(), 3, h);
    ASSERT_EQ(fit.runs.size(), 3u * 3u);
    for (const auto &run : fit.runs) {
        ASSERT_FALSE(run.trace.empty());
        for (std::size_t i = 1; i < run.trace.size(); ++i) EXPECT_LE(run.trace[i], run.trace[i - 1]);
        EXPECT_EQ(run.trace.back(), run.ks);
        for (double p : run.model.p) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
        EXPECT_GT(run.model.dt, 0.0);
        EXPECT_GE(fit.ks, 0.0);
        EXPECT_LE(fit.ks, run.ks);
    }
}

TEST(FitClassical, WorseThanQuantumOnAlternatingPoisson) {
    const auto dist = qcoarse::WaitTimeDistribution::alternating_poisson(1.0);
    qcoarse::ScanOptions o;
    o.samples = 400;
    const double quantum = qcoarse::scan_epsilon(dist, 2, qcoarse::default_eps_grid(), o).best_ks.statistic;
    const double classical = qcoarse::fit_classical(dist, 2, quick()).ks;
    EXPECT_GT(classical, quantum);
}

TEST(FitPresets, Values) {
    const auto desk = qcoarse::fit_preset("desk");
    EXPECT_EQ(desk.seeds, 50);
    EXPECT_EQ(desk.steps_per_state, 2500);
    EXPECT_EQ(desk.eta_p, 1e-4);
    EXPECT_EQ(desk.eta_t, 1e-8);
    EXPECT_EQ(desk.dp, 1e-3);
    EXPECT_EQ(desk.dt_fd, 1e-4);
    const auto paper = qcoarse::fit_preset("paper");
    EXPECT_EQ(paper.seeds, 1000);
    EXPECT_EQ(paper.steps_per_state, 12500);
    const auto warm = qcoarse::fit_preset("bimodal-warmup");
    EXPECT_EQ(warm.warmup_per_state, 1250);
    EXPECT_EQ(warm.warmup_factor, 10.0);
    EXPECT_THROW(qcoarse::fit_preset("fast"), qcoarse::InputError);
}

TEST(Memoryless, ExponentialFitsExactly) {
    const auto dist = qcoarse::WaitTimeDistribution::exponential(2.0);
    const auto fit = qcoarse::fit_memoryless(dist);
    EXPECT_LE(fit.ks.statistic, 1e-6);
    EXPECT_NEAR(fit.rate, 2.0 * qcoarse::default_domain(dist), 1e-4 * fit.rate);
}

TEST(Memoryless, StepIsAtLeastHalf) {
    const auto fit = qcoarse::fit_memoryless(qcoarse::WaitTimeDistribution::top_hat(1.0, 1e-3), 2.0);
    EXPECT_GE(fit.ks.statistic, 0.5 - 1e-3);
}

}  // namespace
