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

#include "qcoarse/qmodel.hpp"

#include <algorithm>
#include <cmath>

#include "qcoarse/errors.hpp"

namespace qcoarse {

namespace {

// exp(w) - 1 without cancellation for small |w|.
cplx expm1c(cplx w) {
    const double s = std::sin(0.5 * w.imag());
    const double re = std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * s * s;
    const double im = std::exp(w.real()) * std::sin(w.imag());
    return {re, im};
}

}  // namespace

GramMatrix gram_matrix(const ExpSum &sum, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("timestep must be positive");
    }
    if (sum.terms.empty()) {
        throw EmptyDecomposition("exponential sum has no terms");
    }
    const auto n = static_cast<Eigen::Index>(sum.size());
    GramMatrix g;
    g.dt = dt;
    g.scaled_weights.resize(n);
    g.event_amplitudes.resize(n);
    g.step_factors.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const ExpTerm &t = sum.terms[static_cast<std::size_t>(j)];
        if (!(t.decay > 0.0)) {
            throw DomainError("exponential sum has a non-decaying term");
        }
        g.scaled_weights(j) = t.weight / std::sqrt(2.0 * t.decay);
        g.event_amplitudes(j) = std::sqrt(-std::expm1(-2.0 * t.decay * dt));
        g.step_factors(j) = std::exp(t.exponent() * dt);
    }
    const Eigen::MatrixXcd m = step_overlap(sum, sum, dt);
    const cplx norm = g.scaled_weights.dot(m * g.scaled_weights);
    if (!(norm.real() > 0.0) || std::abs(norm.imag()) > 1e-10 * std::max(1.0, std::abs(norm))) {
        throw InconsistentDecomposition("reset-state normalization is not a positive real number",
                                        std::abs(norm.imag()));
    }
    g.eta = 1.0 / std::sqrt(norm.real());
    g.matrix = (g.eta * g.eta) * m;
    // Force exact Hermitian symmetry; the two triangles agree to rounding.
    g.matrix = (0.5 * (g.matrix + g.matrix.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.matrix, Eigen::EigenvaluesOnly);
    const double trace = g.matrix.trace().real();
    if (es.eigenvalues()(0) < -kRankThreshold * trace) {
        throw NumericalFailure("Gram matrix is not positive semidefinite", es.eigenvalues()(0));
    }
    return g;
}

Eigen::MatrixXcd step_overlap(const ExpSum &a, const ExpSum &b, double dt) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const auto m = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd out(n, m);
    for (Eigen::Index j = 0; j < n; ++j) {
        const ExpTerm &tj = a.terms[static_cast<std::size_t>(j)];
        const double aj = std::sqrt(-std::expm1(-2.0 * tj.decay * dt));
        for (Eigen::Index k = 0; k < m; ++k) {
            const ExpTerm &tk = b.terms[static_cast<std::size_t>(k)];
            const double bk = std::sqrt(-std::expm1(-2.0 * tk.decay * dt));
            out(j, k) = aj * bk / (-expm1c((std::conj(tj.exponent()) + tk.exponent()) * dt));
        }
    }
    return out;
}

Eigen::MatrixXcd embed_generators(const Eigen::MatrixXcd &gram, double rel_threshold) {
    Eigen::MatrixXcd v = hermitian_factor(gram, rel_threshold);
    if (v.rows() == 0) {
        throw NumericalFailure("Gram matrix has no eigenvalue above the rank threshold");
    }
    return v;
}

Eigen::MatrixXcd assemble_unitary(const Eigen::MatrixXcd &generators, const Eigen::MatrixXcd &images,
                                  Eigen::Index ancilla) {
    const Eigen::Index d = generators.rows();
    const Eigen::Index dim = d * ancilla;
    if (images.rows() != dim || images.cols() != generators.cols()) {
        throw DomainError("image matrix does not match the generator layout");
    }
    const double defect = (images.adjoint() * images - generators.adjoint() * generators).cwiseAbs().maxCoeff();
    if (defect > kIsometryTolerance) {
        throw NumericalFailure("generator images are not an isometry of the generators", defect);
    }
    // Rows of V are orthogonal (eigenvector rows scaled by sqrt(lambda)), so
    // V^+ = V^H diag(1 / ||row||^2).
    const Eigen::VectorXd row_sq = generators.rowwise().squaredNorm();
    const Eigen::MatrixXcd pinv = generators.adjoint() * row_sq.cwiseInverse().asDiagonal();
    Eigen::MatrixXcd action = images * pinv;
    // Small Gram eigenvalues amplify rounding in the pseudo-inverse; replace
    // the block by its nearest isometry (polar factor).
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(action.adjoint() * action);
        const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
        action = (action * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint()).eval();
    }

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<bool> fixed(static_cast<std::size_t>(dim), false);
    for (Eigen::Index m = 0; m < d; ++m) {
        u.col(m * ancilla) = action.col(m);
        fixed[static_cast<std::size_t>(m * ancilla)] = true;
    }
    complete_unitary(u, fixed);
    return u;
}

Eigen::MatrixXcd outcome_block(const Eigen::MatrixXcd &unitary, Eigen::Index ancilla, Eigen::Index outcome) {
    const Eigen::Index d = unitary.rows() / ancilla;
    Eigen::MatrixXcd out(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            out(r, c) = unitary(r * ancilla + outcome, c * ancilla);
        }
    }
    return out;
}

QuantumModel build_unitary(const ExpSum &sum, double dt) {
    const GramMatrix gram = gram_matrix(sum, dt);
    QuantumModel model;
    model.generators = embed_generators(gram);
    model.dimension = model.generators.rows();
    model.ancilla = 2;
    model.dt = dt;
    model.eta = gram.eta;
    model.source = sum;
    model.reset = model.generators * gram.scaled_weights;
    const double rn = model.reset.norm();
    model.reset /= rn;

    const Eigen::Index d = model.dimension;
    const auto n = static_cast<Eigen::Index>(sum.size());
    Eigen::MatrixXcd images = Eigen::MatrixXcd::Zero(2 * d, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx stay = gram.step_factors(j);
        const double fire = gram.eta * gram.event_amplitudes(j);
        for (Eigen::Index m = 0; m < d; ++m) {
            images(2 * m, j) = stay * model.generators(m, j);
            images(2 * m + 1, j) = fire * model.reset(m);
        }
    }
    model.unitary = assemble_unitary(model.generators, images, 2);
    return model;
}

MemoryState memory_state(const QuantumModel &model, double t) {
    if (t < 0.0) {
        throw DomainError("negative time");
    }
    const auto n = static_cast<Eigen::Index>(model.source.size());
    Eigen::VectorXcd coeff(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const ExpTerm &term = model.source.terms[static_cast<std::size_t>(j)];
        coeff(j) = term.weight / std::sqrt(2.0 * term.decay) * std::exp(term.exponent() * t);
    }
    MemoryState out;
    out.state = model.generators * coeff;
    out.norm_squared = out.state.squaredNorm();
    const double norm = std::sqrt(out.norm_squared);
    if (!(norm >= 1e-14)) {
        throw TailUnderflow("memory state vanished", norm);
    }
    out.state /= norm;
    return out;
}

double model_survival(const QuantumModel &model, long long n) {
    if (n < 0) {
        throw DomainError("negative step count");
    }
    const Eigen::MatrixXcd stay = model.block(0);
    Eigen::VectorXcd s = model.reset;
    for (long long i = 0; i < n; ++i) {
        s = stay * s;
    }
    return s.squaredNorm() / model.reset.squaredNorm();
}

std::vector<double> model_survival_curve(const QuantumModel &model, long long steps) {
    if (steps < 0) {
        throw DomainError("negative step count");
    }
    const Eigen::MatrixXcd stay = model.block(0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    // relative to the reset norm so that the curve starts at exactly 1
    const double start = model.reset.squaredNorm();
    Eigen::VectorXcd s = model.reset;
    out.push_back(1.0);
    for (long long i = 0; i < steps; ++i) {
        s = stay * s;
        out.push_back(s.squaredNorm() / start);
    }
    return out;
}

Eigen::Index KernelSpectrum::rank(double rel) const {
    const double cut = rel * trace;
    return static_cast<Eigen::Index>((values.array() > cut).count());
}

namespace {

KernelSpectrum finish_spectrum(const Eigen::MatrixXcd &kernel, bool with_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        kernel, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("kernel eigendecomposition did not converge");
    }
    KernelSpectrum out;
    out.values = es.eigenvalues().reverse();
    if (with_vectors) {
        out.vectors = es.eigenvectors().rowwise().reverse();
    }
    out.trace = kernel.trace().real();
    const double lowest = out.values(out.values.size() - 1);
    if (lowest < -1e-8 * out.trace) {
        out.warning = "kernel matrix has a negative eigenvalue " + std::to_string(lowest);
    }
    return out;
}

void check_points(int points) {
    if (points < 8) {
        throw DomainError("kernel grid needs at least 8 points");
    }
}

}  // namespace

KernelSpectrum kernel_spectrum(const ExpSum &sum, int points, double cutoff, bool with_vectors) {
    check_points(points);
    const SurvivalEvaluator surv(sum);
    if (cutoff <= 0.0) {
        cutoff = 1.0;
        while (surv(cutoff) >= kTailSurvival && cutoff < 1e6) {
            cutoff *= 2.0;
        }
        // tighten to where the survival crosses the tail threshold
        double lo = cutoff > 1.0 ? cutoff / 2.0 : 0.0;
        for (int i = 0; i < 50; ++i) {
            const double mid = 0.5 * (lo + cutoff);
            (surv(mid) >= kTailSurvival ? lo : cutoff) = mid;
        }
    }
    const double mu = 1.0 / mean_wait_tilde(sum);
    const auto n = static_cast<Eigen::Index>(sum.size());
    const double h = cutoff / points;
    Eigen::MatrixXcd e(points, n);
    for (Eigen::Index a = 0; a < points; ++a) {
        const double t = (static_cast<double>(a) + 0.5) * h;
        for (Eigen::Index j = 0; j < n; ++j) {
            e(a, j) = std::exp(sum.terms[static_cast<std::size_t>(j)].exponent() * t);
        }
    }
    Eigen::MatrixXcd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const ExpTerm &tj = sum.terms[static_cast<std::size_t>(j)];
        for (Eigen::Index k = 0; k < n; ++k) {
            const ExpTerm &tk = sum.terms[static_cast<std::size_t>(k)];
            c(j, k) = tj.weight * std::conj(tk.weight) / -(tj.exponent() + std::conj(tk.exponent()));
        }
    }
    Eigen::MatrixXcd kernel = (h * mu) * (e * c * e.adjoint());
    kernel = (0.5 * (kernel + kernel.adjoint())).eval();
    KernelSpectrum out = finish_spectrum(kernel, with_vectors);
    out.cutoff = cutoff;
    // The s-integral is exact; only t beyond the cutoff is lost.
    out.truncation_bound = mu * surv(cutoff) / (2.0 * std::min_element(sum.terms.begin(), sum.terms.end(),
                                                                        [](const ExpTerm &a, const ExpTerm &b) {
                                                                            return a.decay < b.decay;
                                                                        })->decay);
    return out;
}

KernelSpectrum kernel_spectrum(const WaitTimeDistribution &dist, int points, double cutoff, bool with_vectors) {
    check_points(points);
    if (cutoff <= 0.0) {
        cutoff = tail_cutoff(dist);
    }
    const double mu = mean_firing_rate(dist);
    const double h = cutoff / points;
    // psi sampled at t_a + s_b with both on the midpoint grid; s beyond the
    // cutoff is dropped.
    std::vector<double> wave(static_cast<std::size_t>(2 * points));
    for (std::size_t i = 0; i < wave.size(); ++i) {
        wave[i] = sqrt_wave(dist, (static_cast<double>(i) + 1.0) * h);
    }
    Eigen::MatrixXd psi(points, points);
    for (Eigen::Index a = 0; a < points; ++a) {
        for (Eigen::Index b = 0; b < points; ++b) {
            psi(a, b) = wave[static_cast<std::size_t>(a + b)];
        }
    }
    const Eigen::MatrixXd kernel = (mu * h * h) * (psi * psi.transpose());
    KernelSpectrum out = finish_spectrum(kernel.cast<cplx>(), with_vectors);
    out.cutoff = cutoff;
    // Each diagonal entry loses at most mu * Phi(cutoff) to the s-truncation,
    // and t beyond the cutoff carries at most mu * int_T^inf Phi.
    out.truncation_bound = mu * cutoff * survival(dist, cutoff) + std::max(0.0, 1.0 - out.trace);
    return out;
}

}  // namespace qcoarse
