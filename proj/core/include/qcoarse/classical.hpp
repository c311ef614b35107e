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

#ifndef QCOARSE_CLASSICAL_HPP
#define QCOARSE_CLASSICAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcoarse/metrics.hpp"
#include "qcoarse/processes.hpp"

namespace qcoarse {

/// Counter with states 0..N: after an event the counter restarts at 0; in
/// state s an event fires with probability p[s], otherwise it advances to
/// s + 1, except that state N loops back to `loop`.
struct ClassicalCounterModel {
    std::vector<double> p;
    double dt = 1.0;
    int loop = 0;

    int dimension() const {
        return static_cast<int>(p.size());
    }
    void validate() const;
};

/// P(wait = n dt) for n = 1 .. max_steps; leftover mass goes to `residual`.
DiscretePmf classical_wait_pmf(const ClassicalCounterModel &model, long long max_steps);

struct FitHyper {
    double eta_p = 1e-4;
    double eta_t = 1e-8;
    double dp = 1e-3;
    double dt_fd = 1e-4;
    /// S = steps_per_state * dimension
    int steps_per_state = 2500;
    /// W
    int seeds = 50;
    /// learning rates are multiplied by warmup_factor for the first
    /// warmup_per_state * dimension steps
    int warmup_per_state = 0;
    double warmup_factor = 1.0;
    std::uint64_t rng_seed = 1;
    /// intervals of the unit-domain CDF table used by the objective
    int grid = 1000;
    /// smallest timestep admitted by the projection (unit domain); one
    /// interval of the objective's CDF table
    double min_dt = 1e-3;
    bool keep_trace = false;
};

/// "desk", "paper", "bimodal-warmup" or "bimodal-warmup-paper".
FitHyper fit_preset(const std::string &name);

struct FitRun {
    int loop = 0;
    int seed = 0;
    double ks = 0.0;
    ClassicalCounterModel model;
    /// best-so-far objective after each descent step (only when requested)
    std::vector<double> trace;
};

struct ClassicalFit {
    /// timestep in the unit domain [0, 1] of the source window
    ClassicalCounterModel model;
    double ks = 0.0;
    double domain = 1.0;
    int loop = 0;
    int seed = 0;
    std::vector<FitRun> runs;
};

/// KS of the counter against dist on its unit domain (window `domain`),
/// exact at every atom.
double counter_ks(const WaitTimeDistribution &dist, double domain, const ClassicalCounterModel &model);

/// Finite-difference gradient descent on the KS statistic over every loop
/// position and `hyper.seeds` random starts each. domain <= 0 uses
/// default_domain(dist).
ClassicalFit fit_classical(const WaitTimeDistribution &dist, int dimension, const FitHyper &hyper,
                           double domain = 0.0);

struct MemorylessFit {
    double rate = 0.0;  ///< unit-domain rate
    KsReport ks;
};

/// Best single exponential survival against dist on its unit domain.
MemorylessFit fit_memoryless(const WaitTimeDistribution &dist, double domain = 0.0);

}  // namespace qcoarse

#endif  // QCOARSE_CLASSICAL_HPP
