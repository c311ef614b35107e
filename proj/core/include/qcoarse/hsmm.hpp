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

#ifndef QCOARSE_HSMM_HPP
#define QCOARSE_HSMM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcoarse/expsum.hpp"
#include "qcoarse/qmodel.hpp"

namespace qcoarse {

/// Transition g --x--> g' with probability P(x, g'|g) and dwell law phi^x_{g'g}.
struct Edge {
    int from = 0;
    int symbol = 0;
    int to = 0;
    double prob = 0.0;
    WaitTimeDistribution dwell = WaitTimeDistribution::exponential(1.0);
};

/// Hidden semi-Markov process. Dwell laws are expressed in their own time
/// coordinate; their time_unit maps it to the shared process clock.
struct Hsmm {
    std::vector<std::string> modes;
    std::vector<std::string> events;
    std::vector<Edge> edges;

    int mode_index(const std::string &name) const;
    int event_index(const std::string &name) const;
};

struct ValidationReport {
    std::vector<std::string> errors;
    /// strong-condition violations and other non-fatal findings
    std::vector<std::string> warnings;
    /// (mode, event) pairs reaching more than one next mode
    std::vector<std::pair<int, int>> violations;

    bool valid() const {
        return errors.empty();
    }
    bool strong_condition() const {
        return violations.empty();
    }
};

ValidationReport validate(const Hsmm &h);

/// Phi_g(t) on the process clock.
double modal_survival(const Hsmm &h, int mode, double t);

struct StationaryOptions {
    /// start distribution for chains with several closed classes; the
    /// result is then the Cesaro limit from this start
    std::optional<std::vector<double>> initial;
    /// weight edges by mean dwell time (time fraction rather than event fraction)
    bool dwell_weighted = false;
};

/// P(x, g) per edge (indexed like h.edges; zero-probability edges get 0).
std::vector<double> stationary_event_weights(const Hsmm &h, const StationaryOptions &options = {});

/// Stationary distribution over modes of the embedded chain.
std::vector<double> stationary_modes(const Hsmm &h, const std::optional<std::vector<double>> &initial = {});

/// Unit-domain decompositions keyed by dwell description, reusable across
/// processes that share dwell laws.
class DecompositionCache {
public:
    DecompositionCache(int max_terms, std::vector<double> eps_list, ScanOptions options = {});
    const ScanResult &get(const WaitTimeDistribution &dwell);

    int max_terms() const {
        return max_terms_;
    }

private:
    int max_terms_;
    std::vector<double> eps_;
    ScanOptions options_;
    std::map<std::string, ScanResult> results_;
};

struct CompressedHsmm {
    Hsmm source;
    /// indices into source.edges of edges with positive probability
    std::vector<int> edges;
    /// unit-domain sums, identical to the renewal decomposition of each dwell
    std::vector<ExpSum> unit_sums;
    /// the same sums on the process clock
    std::vector<ExpSum> clock_sums;
    std::vector<double> edge_ks;
    std::vector<double> edge_eps;
    /// offset of each edge's generators in the joint generator list
    std::vector<Eigen::Index> offsets;
    std::vector<double> etas;
    /// reset-state overlaps <reset_g|reset_h>
    Eigen::MatrixXcd overlaps;
    Eigen::MatrixXcd gram;
    Eigen::MatrixXcd generators;
    /// column g is the reset state of mode g
    Eigen::MatrixXcd resets;
    Eigen::MatrixXcd unitary;
    Eigen::Index dimension = 0;
    Eigen::Index generator_count = 0;
    /// ancilla size 1 + |X|; outcome 0 is "no event", 1 + x is event x
    Eigen::Index ancilla = 0;
    double dt = 0.0;

    Eigen::Index unused_dimensions() const {
        return generator_count - dimension;
    }
    Eigen::MatrixXcd block(Eigen::Index outcome) const {
        return outcome_block(unitary, ancilla, outcome);
    }
};

struct CompressOptions {
    std::vector<double> eps_list = default_eps_grid();
    ScanOptions scan;
    /// timestep on the process clock
    double dt = kDefaultTimestep;
    /// reuse decompositions; must match max_terms / eps_list when given
    DecompositionCache *cache = nullptr;
};

/// Per-edge exponential sums combined into one memory with a shared
/// unitary. Requires the strong condition.
CompressedHsmm compress(const Hsmm &h, int max_terms, const CompressOptions &options = {});

/// Memory state of mode g at time t since its last event (normalized).
MemoryState memory_state(const CompressedHsmm &model, int mode, double t);

/// Sum over edges of KS(phi_e, phi~_e) weighted by P(x, g).
double averaged_ks(const CompressedHsmm &model, const StationaryOptions &options = {});

/// Same, computed from the cached decompositions without building a unitary.
double averaged_ks(const Hsmm &h, DecompositionCache &cache, const StationaryOptions &options = {});

struct InterferenceEntry {
    int mode = 0;
    int symbol = 0;
    int first = 0;   ///< edge index
    int second = 0;  ///< edge index
    /// integral of phi~_first phi~_second on the process clock
    double approx_density_overlap = 0.0;
    cplx approx_wave_overlap;
    /// integral of phi_first phi_second for the exact dwells
    double exact_density_overlap = 0.0;
};

/// Overlaps for every pair of edges sharing (mode, event) with different
/// next modes. `clock_sums` are indexed like h.edges.
std::vector<InterferenceEntry> interference_diagnostic(const Hsmm &h, const std::vector<ExpSum> &clock_sums);
/// Decomposes every edge first.
std::vector<InterferenceEntry> interference_diagnostic(const Hsmm &h, int max_terms,
                                                       const std::vector<double> &eps_list = default_eps_grid(),
                                                       const ScanOptions &scan = {});

/// Integral of phi~_a phi~_b over t >= 0.
double density_overlap(const ExpSum &a, const ExpSum &b);
/// Integral of conj(psi~_a) psi~_b over t >= 0.
cplx wave_overlap(const ExpSum &a, const ExpSum &b);
/// Integral of phi_a phi_b on the process clock; exactly 0 for disjoint supports.
double exact_density_overlap(const WaitTimeDistribution &a, const WaitTimeDistribution &b);

/// Rescales every dwell so its mean wait on the process clock is 1 / rate.
Hsmm equalize_rates(Hsmm h, double rate = 1.0);

/// Two modes A, B and events x, y. From A: x with probability 1 - p
/// (alternating Poisson dwell, switch to B), y with probability p (bimodal
/// Gaussian dwell, stay). From B the same with q. Zero-probability edges are
/// omitted and dwells share the mean firing rate `rate`.
Hsmm example_process(double p, double q, double rate = 1.0);

/// Mode g emits x after a dwell uniform on [0, tau]: to g1 when the dwell is
/// below tau / 2 and to g2 otherwise; g1 and g2 return to g with event x
/// after an exponential dwell of rate 1 / tau.
Hsmm split_uniform_process(double tau = 1.0);

struct HsmmTrajectory {
    std::uint64_t seed = 0;
    std::vector<int> modes;    ///< mode before each event
    std::vector<int> symbols;  ///< event symbol
    std::vector<long long> waits;
    long long steps = 0;
    /// max |sum of outcome probabilities - 1| over steps that emitted an event
    double max_probability_defect = 0.0;
    double max_reset_deviation = 0.0;
};

HsmmTrajectory run_trajectory(const CompressedHsmm &model, int start_mode, std::uint64_t seed,
                              long long target_events, long long max_steps = 100'000'000);

}  // namespace qcoarse

#endif  // QCOARSE_HSMM_HPP
