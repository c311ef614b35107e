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

#include "qcoarse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcoarse/errors.hpp"

namespace qcoarse {

Eigen::VectorXd HankelEigen::full_vector(Eigen::Index i) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
    v.head(block()) = vectors.col(i);
    return v;
}

HankelEigen hankel_eigen(std::span<const double> samples) {
    if (samples.size() < 3 || (samples.size() - 1) % 2 != 0) {
        throw DomainError("Hankel construction needs M + 1 samples with M even");
    }
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw InputError("non-finite sample in Hankel input");
        }
    }
    const auto half = static_cast<Eigen::Index>((samples.size() - 1) / 2);
    Eigen::Index last = -1;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (samples[j] != 0.0) {
            last = static_cast<Eigen::Index>(j);
        }
    }
    if (last < 0) {
        throw NumericalFailure("all samples are zero");
    }
    const Eigen::Index block = std::min(half, last) + 1;
    Eigen::MatrixXd hankel(block, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        for (Eigen::Index k = 0; k < block; ++k) {
            hankel(j, k) = samples[static_cast<std::size_t>(j + k)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hankel);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("Hankel eigendecomposition did not converge");
    }
    HankelEigen out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    out.size = half + 1;
    return out;
}

namespace {

// Diagonal similarity scaling by powers of two so that row and column norms
// are comparable (Parlett-Reinsch). Eigenvalues are unchanged.
void balance(Eigen::MatrixXd &a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd &coeffs) {
    const double scale = coeffs.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw NumericalFailure("polynomial has no finite non-zero coefficient");
    }
    Eigen::Index hi = coeffs.size() - 1;
    while (hi > 0 && std::abs(coeffs(hi)) <= 1e-14 * scale) {
        --hi;
    }
    Eigen::Index lo = 0;
    while (lo < hi && coeffs(lo) == 0.0) {
        ++lo;
    }
    const Eigen::Index degree = hi - lo;
    Eigen::VectorXcd roots(hi);
    roots.head(lo).setZero();
    if (degree == 0) {
        return roots;
    }
    // Companion matrix of the monic polynomial coeffs(lo..hi) / coeffs(hi).
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (Eigen::Index j = 0; j < degree; ++j) {
        companion(0, j) = -coeffs(hi - 1 - j) / coeffs(hi);
    }
    for (Eigen::Index i = 1; i < degree; ++i) {
        companion(i, i - 1) = 1.0;
    }
    balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("companion eigenvalue iteration did not converge");
    }
    roots.tail(degree) = solver.eigenvalues();
    return roots;
}

VandermondeFit vandermonde_least_squares(const Eigen::VectorXcd &roots, std::span<const double> h,
                                         LeastSquaresMode mode) {
    const auto rows = static_cast<Eigen::Index>(h.size());
    const Eigen::Index cols = roots.size();
    if (rows == 0 || cols == 0) {
        throw NumericalFailure("empty Vandermonde system");
    }
    const double top = static_cast<double>(rows - 1);
    Eigen::MatrixXcd a(rows, cols);
    Eigen::VectorXd column_scale(cols);  // V_jk = a_jk * column_scale_k
    for (Eigen::Index k = 0; k < cols; ++k) {
        const cplx g = roots(k);
        if (g == cplx(0.0)) {
            a.col(k).setZero();
            a(0, k) = 1.0;
            column_scale(k) = 1.0;
            continue;
        }
        const cplx lg = std::log(g);
        const double shift = lg.real() > 0.0 ? top * lg.real() : 0.0;
        for (Eigen::Index j = 0; j < rows; ++j) {
            a(j, k) = std::exp(static_cast<double>(j) * lg - shift);
        }
        const double n = a.col(k).norm();
        a.col(k) /= n;
        column_scale(k) = n * std::exp(shift);
    }
    Eigen::VectorXcd rhs(rows);
    for (Eigen::Index j = 0; j < rows; ++j) {
        rhs(j) = h[static_cast<std::size_t>(j)];
    }

    VandermondeFit fit;
    Eigen::VectorXcd y;
    auto solve = [&](const Eigen::MatrixXcd &m, const Eigen::VectorXcd &b) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
        cod.setThreshold(1.0 / kConditionLimit);
        cod.compute(m);
        fit.rank = cod.rank();
        const auto &r = cod.matrixQTZ();
        const Eigen::Index full = std::min(m.rows(), m.cols());
        const double lead = std::abs(r(0, 0));
        const double tail = std::abs(r(full - 1, full - 1));
        fit.condition = tail > 0.0 ? lead / tail : std::numeric_limits<double>::infinity();
        fit.truncated = fit.rank < full;
        return Eigen::VectorXcd(cod.solve(b));
    };
    if (mode == LeastSquaresMode::ConjugateTranspose) {
        y = solve(a, rhs);
    } else {
        const Eigen::MatrixXcd at = a.transpose();
        y = solve(at * a, at * rhs);
    }
    const double hn = rhs.norm();
    fit.residual = hn > 0.0 ? (rhs - a * y).norm() / hn : (rhs - a * y).norm();
    fit.weights = y.cwiseQuotient(column_scale.cast<cplx>());
    if (!fit.weights.allFinite() && mode == LeastSquaresMode::ConjugateTranspose) {
        throw NumericalFailure("Vandermonde solve produced non-finite weights", fit.residual);
    }
    return fit;
}

Eigen::MatrixXcd hermitian_factor(const Eigen::MatrixXcd &gram, double rel_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("Gram eigendecomposition did not converge");
    }
    const double trace = gram.trace().real();
    const double cut = rel_threshold * trace;
    const Eigen::VectorXd &vals = solver.eigenvalues();  // ascending
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = vals.size(); i-- > 0;) {
        if (vals(i) > cut) {
            keep.push_back(i);
        }
    }
    Eigen::MatrixXcd v(static_cast<Eigen::Index>(keep.size()), gram.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const Eigen::Index i = keep[r];
        v.row(static_cast<Eigen::Index>(r)) = std::sqrt(vals(i)) * solver.eigenvectors().col(i).adjoint();
    }
    return v;
}

void complete_unitary(Eigen::MatrixXcd &u, const std::vector<bool> &fixed) {
    const Eigen::Index n = u.rows();
    std::vector<Eigen::Index> accepted;
    std::vector<Eigen::Index> open;
    for (Eigen::Index c = 0; c < n; ++c) {
        (fixed[static_cast<std::size_t>(c)] ? accepted : open).push_back(c);
    }
    Eigen::Index candidate = 0;
    for (Eigen::Index slot : open) {
        for (;; ++candidate) {
            if (candidate >= n) {
                throw NumericalFailure("unitary completion ran out of candidate vectors");
            }
            Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, candidate);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index c : accepted) {
                    v -= u.col(c) * u.col(c).dot(v);
                }
            }
            const double norm = v.norm();
            if (norm > 1e-6) {
                u.col(slot) = v / norm;
                accepted.push_back(slot);
                ++candidate;
                break;
            }
        }
    }
}

double unitarity_defect(const Eigen::MatrixXcd &u) {
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

}  // namespace qcoarse
