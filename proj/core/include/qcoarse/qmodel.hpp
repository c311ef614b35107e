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

#ifndef QCOARSE_QMODEL_HPP
#define QCOARSE_QMODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcoarse/expsum.hpp"
#include "qcoarse/processes.hpp"

namespace qcoarse {

/// Relative (to the trace) eigenvalue cut for embedding and spectra.
inline constexpr double kRankThreshold = 1e-10;
inline constexpr double kDefaultTimestep = 1e-3;
inline constexpr double kIsometryTolerance = 1e-9;

/// Overlaps <phi_j|phi_k> of the generator states at finite timestep.
struct GramMatrix {
    Eigen::MatrixXcd matrix;  ///< G = eta^2 M
    double eta = 1.0;
    double dt = 0.0;
    /// c'_j = c_j / sqrt(2 gamma_j)
    Eigen::VectorXcd scaled_weights;
    /// a_j = sqrt(1 - exp(-2 gamma_j dt)), the event amplitude of term j
    Eigen::VectorXd event_amplitudes;
    /// exp(z_j dt)
    Eigen::VectorXcd step_factors;
};

GramMatrix gram_matrix(const ExpSum &sum, double dt);

/// M_jk = a_j b_k / (1 - exp((conj(z_j) + w_k) dt)) for terms z of `a` and w
/// of `b`, with a_j, b_k the event amplitudes: the fixed point of the
/// one-step overlap recursion between two generator families.
Eigen::MatrixXcd step_overlap(const ExpSum &a, const ExpSum &b, double dt);

/// d x n matrix V with V^H V = G; d is the numerical rank of G.
Eigen::MatrixXcd embed_generators(const Eigen::MatrixXcd &gram, double rel_threshold = kRankThreshold);
inline Eigen::MatrixXcd embed_generators(const GramMatrix &gram) {
    return embed_generators(gram.matrix);
}

/// Builds the unitary on (memory x ancilla), index m * ancilla + a, from the
/// required images of the generator states v_j (x) |0>.
///
/// `images` has d * ancilla rows and one column per generator. Throws
/// NumericalFailure when images^H images differs from V^H V by more than
/// kIsometryTolerance.
Eigen::MatrixXcd assemble_unitary(const Eigen::MatrixXcd &generators, const Eigen::MatrixXcd &images,
                                  Eigen::Index ancilla);

/// (I (x) <a|) U (I (x) |0>) for a unitary in the m * ancilla + a layout.
Eigen::MatrixXcd outcome_block(const Eigen::MatrixXcd &unitary, Eigen::Index ancilla, Eigen::Index outcome);

struct QuantumModel {
    Eigen::Index dimension = 0;
    Eigen::Index ancilla = 2;
    Eigen::MatrixXcd generators;  ///< d x N, column j is |phi_j>
    Eigen::VectorXcd reset;
    Eigen::MatrixXcd unitary;  ///< (d * ancilla) square
    double dt = 0.0;
    double eta = 1.0;
    ExpSum source;

    Eigen::MatrixXcd block(Eigen::Index outcome) const {
        return outcome_block(unitary, ancilla, outcome);
    }
};

QuantumModel build_unitary(const ExpSum &sum, double dt = kDefaultTimestep);

struct MemoryState {
    Eigen::VectorXcd state;
    /// squared norm before normalization; tracks survival_tilde(t)
    double norm_squared = 0.0;
};

/// Normalized sum_j c'_j exp(z_j t) |phi_j>.
MemoryState memory_state(const QuantumModel &model, double t);

/// Probability of no event in the first n steps.
double model_survival(const QuantumModel &model, long long n);
/// model_survival for n = 0 .. steps.
std::vector<double> model_survival_curve(const QuantumModel &model, long long steps);

struct KernelSpectrum {
    Eigen::VectorXd values;  ///< descending
    Eigen::MatrixXcd vectors;  ///< columns match values; empty unless requested
    double trace = 0.0;
    double cutoff = 0.0;
    /// bound on kernel mass lost to truncating the integration window
    double truncation_bound = 0.0;
    std::optional<std::string> warning;

    /// Count of eigenvalues above rel * trace.
    Eigen::Index rank(double rel = 1e-8) const;
};

/// Spectrum of the steady-state kernel rho(t, t') on a K-point midpoint grid
/// over [0, cutoff], in the sum's unit-domain time. cutoff <= 0 picks the
/// time where the survival falls below the tail threshold.
KernelSpectrum kernel_spectrum(const ExpSum &sum, int points, double cutoff = 0.0, bool with_vectors = false);
/// Same for an exact law, in its own time; cutoff <= 0 uses tail_cutoff.
KernelSpectrum kernel_spectrum(const WaitTimeDistribution &dist, int points, double cutoff = 0.0,
                               bool with_vectors = false);

}  // namespace qcoarse

#endif  // QCOARSE_QMODEL_HPP
