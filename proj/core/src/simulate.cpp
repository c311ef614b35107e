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

#include "qcoarse/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "qcoarse/errors.hpp"
#include "qcoarse/parallel.hpp"

namespace qcoarse {

Trajectory run_trajectory(const QuantumModel &model, std::uint64_t seed, long long max_steps,
                          long long target_events) {
    if (max_steps < 1) {
        throw DomainError("max_steps must be at least 1");
    }
    const Eigen::MatrixXcd stay = model.block(0);
    const Eigen::MatrixXcd fire = model.block(1);
    std::mt19937_64 rng(seed);
    Trajectory out;
    out.seed = seed;
    out.dt = model.dt;
    Eigen::VectorXcd s = model.reset;
    Eigen::VectorXcd s0(s.size()), s1(s.size());
    long long since = 0;
    for (long long step = 0; step < max_steps; ++step) {
        s0.noalias() = stay * s;
        s1.noalias() = fire * s;
        const double p0 = s0.squaredNorm();
        const double p1 = s1.squaredNorm();
        out.max_probability_defect = std::max(out.max_probability_defect, std::abs(p0 + p1 - 1.0));
        ++since;
        ++out.steps;
        if (uniform01(rng) < p0) {
            s = s0 / std::sqrt(p0);
            continue;
        }
        if (!(p1 > 0.0)) {
            std::fprintf(stderr, "qcoarse: event branch with zero probability (seed %llu, step %lld)\n",
                         static_cast<unsigned long long>(seed), step);
            std::abort();
        }
        s1 /= std::sqrt(p1);
        out.max_reset_deviation = std::max(out.max_reset_deviation, 1.0 - std::abs(model.reset.dot(s1)));
        out.events.push_back(since);
        since = 0;
        s = model.reset;
        if (target_events > 0 && static_cast<long long>(out.events.size()) >= target_events) {
            return out;
        }
    }
    out.truncated = since > 0;
    return out;
}

std::vector<long long> sample_waits(const QuantumModel &model, std::uint64_t seed, long long count,
                                    int trajectories, long long max_steps) {
    if (count < 1 || trajectories < 1) {
        throw DomainError("sample count and trajectory count must be positive");
    }
    const auto n = static_cast<std::size_t>(trajectories);
    std::vector<Trajectory> runs(n);
    parallel_for(n, [&](std::size_t i) {
        const long long share = count / trajectories + (static_cast<long long>(i) < count % trajectories ? 1 : 0);
        runs[i] = run_trajectory(model, seed + i, max_steps, share);
    });
    std::vector<long long> out;
    out.reserve(static_cast<std::size_t>(count));
    for (const auto &r : runs) {
        out.insert(out.end(), r.events.begin(), r.events.end());
    }
    return out;
}

std::vector<double> empirical_survival(std::span<const long long> waits, double dt, std::span<const double> times) {
    if (waits.empty()) {
        throw InputError("no wait samples");
    }
    std::vector<double> sorted(waits.size());
    std::transform(waits.begin(), waits.end(), sorted.begin(),
                   [dt](long long w) { return static_cast<double>(w) * dt; });
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        out.push_back(static_cast<double>(above) / n);
    }
    return out;
}

KsReport ks_empirical(std::span<const long long> waits, double dt, const CurveFn &curve) {
    if (waits.empty()) {
        throw InputError("no wait samples");
    }
    const long long top = *std::max_element(waits.begin(), waits.end());
    std::vector<long long> counts(static_cast<std::size_t>(top) + 1, 0);
    for (long long w : waits) {
        if (w < 1) {
            throw InputError("wait counts must be at least 1");
        }
        ++counts[static_cast<std::size_t>(w)];
    }
    const double n = static_cast<double>(waits.size());
    KsReport out;
    out.resolution = static_cast<std::size_t>(top) + 2;
    long long remaining = static_cast<long long>(waits.size());
    for (long long k = 0; k <= top + 1; ++k) {
        if (k <= top) {
            remaining -= counts[static_cast<std::size_t>(k)];
        }
        const double t = static_cast<double>(k) * dt;
        const double gap = std::abs(static_cast<double>(remaining) / n - curve(t));
        if (gap > out.statistic) {
            out.statistic = gap;
            out.argmax = t;
        }
    }
    return out;
}

}  // namespace qcoarse
