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

#ifndef QCOARSE_SIMULATE_HPP
#define QCOARSE_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "qcoarse/metrics.hpp"
#include "qcoarse/qmodel.hpp"

namespace qcoarse {

inline constexpr long long kDefaultMaxSteps = 10'000'000;
inline constexpr const char *kRngName = "mt19937_64";

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Trajectory {
    std::uint64_t seed = 0;
    double dt = 0.0;
    /// completed inter-event intervals in steps, each >= 1
    std::vector<long long> events;
    /// the step budget ran out inside an interval (that interval is dropped)
    bool truncated = false;
    long long steps = 0;
    /// max |p0 + p1 - 1| over all steps
    double max_probability_defect = 0.0;
    /// max (1 - |<reset|post-event state>|) over all events
    double max_reset_deviation = 0.0;
};

/// Sweeps the model from its reset state, one unitary plus ancilla
/// measurement per step, until `max_steps` steps or `target_events` events
/// (0 = no target).
Trajectory run_trajectory(const QuantumModel &model, std::uint64_t seed, long long max_steps = kDefaultMaxSteps,
                          long long target_events = 0);

/// Collects `count` waits split across trajectories seeded seed, seed+1, ...;
/// trajectories run concurrently and their samples are merged in seed order.
std::vector<long long> sample_waits(const QuantumModel &model, std::uint64_t seed, long long count,
                                    int trajectories = 8, long long max_steps = kDefaultMaxSteps);

/// Fraction of waits with waits[i] * dt > t, for each t in `times`.
std::vector<double> empirical_survival(std::span<const long long> waits, double dt, std::span<const double> times);

/// sup_n |S_emp(n dt) - curve(n dt)| over the step lattice up to the largest
/// sample (and one step beyond).
KsReport ks_empirical(std::span<const long long> waits, double dt, const CurveFn &curve);

}  // namespace qcoarse

#endif  // QCOARSE_SIMULATE_HPP
