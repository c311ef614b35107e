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

#ifndef QCOARSE_LINALG_HPP
#define QCOARSE_LINALG_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qcoarse {

using cplx = std::complex<double>;

/// Eigendecomposition of the square Hankel matrix H_jk = h_{j+k}, 0 <= j,k <= M/2.
///
/// Rows j with h_{j+k} = 0 for all k are identically zero, so when the
/// samples end in a run of zeros only the leading `block` x `block` part is
/// decomposed; the remaining eigenpairs are (0, e_j) and are reported through
/// `size` without being materialized.
struct HankelEigen {
    Eigen::VectorXd values;   ///< eigenvalues of the leading block
    Eigen::MatrixXd vectors;  ///< block x block eigenvectors
    Eigen::Index size = 0;    ///< full Hankel order M/2 + 1

    Eigen::Index block() const {
        return values.size();
    }
    /// Eigenvector of the full matrix for block index i (zero-padded).
    Eigen::VectorXd full_vector(Eigen::Index i) const;
};

HankelEigen hankel_eigen(std::span<const double> samples);

/// Roots of sum_j coeffs[j] z^j via eigenvalues of the balanced companion
/// matrix. Negligible leading coefficients (relative 1e-14) are dropped and
/// exact zeros at the constant end become roots at the origin.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd &coeffs);

enum class LeastSquaresMode {
    /// minimizes ||V c - h||_2 over complex c
    ConjugateTranspose,
    /// c = (V^T V)^{-1} V^T h with the plain transpose
    PlainTranspose,
};

struct VandermondeFit {
    Eigen::VectorXcd weights;
    double residual = 0.0;   ///< ||h - V c|| / ||h||
    double condition = 0.0;  ///< pivot ratio of the column-equilibrated system
    Eigen::Index rank = 0;
    bool truncated = false;  ///< true when the condition guard dropped directions
};

inline constexpr double kConditionLimit = 1e14;

/// Fits h_j ~ sum_k c_k roots_k^j for 0 <= j < h.size().
///
/// Columns are rescaled by |root|^{-M} when |root| > 1 and then normalized,
/// which keeps every entry finite. The system is solved by a complete
/// orthogonal decomposition; pivots below 1/kConditionLimit of the largest
/// are treated as zero (truncated pseudo-solve).
VandermondeFit vandermonde_least_squares(const Eigen::VectorXcd &roots, std::span<const double> h,
                                         LeastSquaresMode mode = LeastSquaresMode::ConjugateTranspose);

/// Factor a Hermitian PSD matrix as G = V^H V with V of size d x n, where d
/// counts eigenvalues above rel_threshold * trace(G). Rows of V follow
/// descending eigenvalue order.
Eigen::MatrixXcd hermitian_factor(const Eigen::MatrixXcd &gram, double rel_threshold);

/// Fill the columns of `u` not flagged in `fixed` with an orthonormal
/// completion. Candidates are the canonical basis vectors in index order,
/// orthogonalized twice against all accepted columns.
void complete_unitary(Eigen::MatrixXcd &u, const std::vector<bool> &fixed);

/// max_ij |(U^H U - I)_ij|
double unitarity_defect(const Eigen::MatrixXcd &u);

}  // namespace qcoarse

#endif  // QCOARSE_LINALG_HPP
