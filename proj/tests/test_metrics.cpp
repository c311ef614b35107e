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

#include <algorithm>
#include <cmath>
#include <random>

#include "qcoarse/metrics.hpp"
#include "qcoarse/processes.hpp"

namespace {

using qcoarse::DiscretePmf;
using qcoarse::KsReport;

TEST(KsContinuousDiscrete, UniformAgainstItsDiscretization) {
    for (int n : {10, 100, 1000}) {
        DiscretePmf q;
        q.step = 1.0 / n;
        q.mass.assign(n, 1.0 / n);
        const KsReport r = qcoarse::ks_continuous_discrete([](double t) { return std::clamp(t, 0.0, 1.0); }, q);
        EXPECT_NEAR(r.statistic, 1.0 / n, 1e-12);
    }
}

TEST(KsContinuousDiscrete, ExponentialAgainstGeometric) {
    for (double dt : {0.01, 0.1, 0.5}) {
        const double q = 1.0 - std::exp(-dt);
        DiscretePmf pmf;
        pmf.step = dt;
        double alive = 1.0;
        while (alive > 1e-16) {
            pmf.mass.push_back(alive * q);
            alive *= 1.0 - q;
        }
        pmf.residual = alive;
        const KsReport r = qcoarse::ks_continuous_discrete([](double t) { return 1.0 - std::exp(-t); }, pmf);
        EXPECT_LE(r.statistic, q + 1e-12);
        // the first atom: just below dt the step CDF is 0 while the exponential has 1 - e^{-dt}
        EXPECT_NEAR(r.statistic, q, 1e-12);
    }
}

TEST(KsContinuousDiscrete, MatchingPointMassIsSmall) {
    DiscretePmf q;
    q.step = 1.0;
    q.mass = {1.0};
    // a steep logistic CDF centred at the atom
    const auto cdf = [](double t) { return 1.0 / (1.0 + std::exp(-(t - 1.0) * 1e6)); };
    EXPECT_LE(qcoarse::ks_continuous_discrete(cdf, q).statistic, 0.5 + 1e-12);
    EXPECT_GE(qcoarse::ks_continuous_discrete(cdf, q).statistic, 0.5 - 1e-12);
}

TEST(KsSurvival, IdenticalCurvesGiveZero) {
    const auto s = [](double t) { return std::exp(-t * t); };
    EXPECT_EQ(qcoarse::ks_survival(s, s).statistic, 0.0);
}

TEST(KsSurvival, RateMismatchClosedForm) {
    const double t_star = std::log(1.1) / 0.1;
    const double expected = std::exp(-t_star) - std::exp(-1.1 * t_star);
    const KsReport r = qcoarse::ks_survival([](double t) { return std::exp(-t); },
                                            [](double t) { return std::exp(-1.1 * t); }, 10.0, 100000);
    EXPECT_NEAR(r.statistic, expected, 1e-9);
    EXPECT_NEAR(r.argmax, t_star, 1e-3);
}

TEST(KsSurvival, MemorylessCannotFitAStep) {
    const auto hat = qcoarse::WaitTimeDistribution::top_hat(1.0, 1e-4);
    double best = 1.0;
    for (int i = 1; i <= 400; ++i) {
        const double rate = 0.01 * i;
        const double ks = qcoarse::ks_survival([&](double t) { return qcoarse::survival(hat, t); },
                                               [&](double t) { return std::exp(-rate * t); }, 2.0, 2000)
                              .statistic;
        best = std::min(best, ks);
    }
    EXPECT_GE(best, 0.5 - 1e-3);
}

TEST(KsSurvival, Symmetric) {
    const auto a = [](double t) { return std::exp(-t); };
    const auto b = [](double t) { return 1.0 / (1.0 + t * t); };
    EXPECT_EQ(qcoarse::ks_survival(a, b).statistic, qcoarse::ks_survival(b, a).statistic);
}

TEST(KsSurvival, GridRefinementConverges) {
    const auto a = [](double t) { return std::exp(-3.0 * t); };
    const auto b = [](double t) { return std::exp(-2.0 * t * t); };
    const double coarse = qcoarse::ks_survival(a, b, 1.0, 1000).statistic;
    const double fine = qcoarse::ks_survival(a, b, 1.0, 2000).statistic;
    EXPECT_LE(std::abs(coarse - fine), 1e-3);
}

TEST(KsSurvival, TriangleInequality) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double ra = rate(rng), rb = rate(rng), rc = rate(rng);
        const auto a = [&](double t) { return std::exp(-ra * t); };
        const auto b = [&](double t) { return std::exp(-rb * t * t); };
        const auto c = [&](double t) { return 1.0 / (1.0 + rc * t); };
        const auto grid = qcoarse::survival_grid(a, c, 1.0, 1000, 1e-6, 50.0);
        std::vector<double> va, vb, vc;
        for (double t : grid) {
            va.push_back(a(t));
            vb.push_back(b(t));
            vc.push_back(c(t));
        }
        const double ac = qcoarse::ks_survival(va, vc, grid).statistic;
        const double ab = qcoarse::ks_survival(va, vb, grid).statistic;
        const double bc = qcoarse::ks_survival(vb, vc, grid).statistic;
        EXPECT_LE(ac, ab + bc + 1e-15);
    }
}

TEST(KsSurvival, GridExtendsUntilTailsVanish) {
    const auto a = [](double t) { return std::exp(-0.5 * t); };
    const auto grid = qcoarse::survival_grid(a, a, 1.0, 100);
    EXPECT_LT(a(grid.back()), 1e-6);
    EXPECT_EQ(grid.front(), 0.0);
}

TEST(AveragedKs, Examples) {
    const std::vector<double> one{1.0}, k1{0.25};
    EXPECT_EQ(qcoarse::averaged_ks(one, k1), 0.25);
    const std::vector<double> half{0.5, 0.5}, k2{0.1, 0.3};
    EXPECT_NEAR(qcoarse::averaged_ks(half, k2), 0.2, 1e-15);
}

TEST(AveragedKs, RejectsBadWeights) {
    const std::vector<double> w{0.5, 0.4}, k{0.1, 0.3};
    EXPECT_ANY_THROW(qcoarse::averaged_ks(w, k));
    const std::vector<double> w3{0.5, 0.25, 0.25};
    EXPECT_ANY_THROW(qcoarse::averaged_ks(w3, k));
}

TEST(KsReport, CsvRoundTrip) {
    KsReport r;
    r.statistic = 0.1 + 1e-17;
    r.argmax = 1.0 / 3.0;
    const KsReport back = KsReport::from_csv_row(r.csv_row());
    EXPECT_EQ(back.statistic, r.statistic);
    EXPECT_EQ(back.argmax, r.argmax);
}

}  // namespace
