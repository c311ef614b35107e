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

#ifndef QCOARSE_EXPSUM_HPP
#define QCOARSE_EXPSUM_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcoarse/linalg.hpp"
#include "qcoarse/metrics.hpp"
#include "qcoarse/processes.hpp"

namespace qcoarse {

/// One term c exp((-decay + i frequency) t).
struct ExpTerm {
    cplx weight;
    double decay = 0.0;
    double frequency = 0.0;

    cplx exponent() const {
        return {-decay, frequency};
    }
};

/// psi~(t) = sum_j c_j exp(z_j t) on the unit domain.
///
/// `domain_scale` records the factor M that turned per-sample exponents into
/// unit-domain exponents; `time_scale` is the length T of the source window in
/// the distribution's own time, so unit time s corresponds to T s.
struct ExpSum {
    std::vector<ExpTerm> terms;
    double domain_scale = 1.0;
    double time_scale = 1.0;

    std::size_t size() const {
        return terms.size();
    }
};

/// Raw output of one Hankel/Prony pass, exponents per sample index.
struct Candidates {
    std::vector<ExpTerm> terms;
    double domain_scale = 1.0;
    double time_scale = 1.0;
    double eigenvalue = 0.0;
    double residual = 0.0;
    double condition = 0.0;
    bool truncated = false;
};

struct BeylkinMonzonOptions {
    LeastSquaresMode mode = LeastSquaresMode::ConjugateTranspose;
};

/// Caches the Hankel eigendecomposition of one sample vector and the
/// candidate sets derived from each selected eigenvector, so scans over many
/// precisions (and many term budgets) pay for each eigenvector once.
///
/// Samples are normalized to unit l2 norm before the Hankel matrix is built,
/// which makes the precision scale independent of the amplitude of psi;
/// returned weights refer to the original samples.
class HankelDecomposer {
public:
    explicit HankelDecomposer(std::vector<double> samples, double time_scale = 1.0,
                              BeylkinMonzonOptions options = {});

    /// Index of the eigenvalue whose magnitude is closest to eps; ties go to
    /// the smaller magnitude. Returns -1 for the implicit zero eigenvalue of
    /// trailing all-zero rows.
    Eigen::Index select(double eps) const;
    double eigenvalue(Eigen::Index index) const;

    /// Computes (and caches) the candidate set for a selected eigenvector.
    const Candidates &candidates(Eigen::Index index);
    const Candidates &candidates_for(double eps) {
        return candidates(select(eps));
    }
    /// Fill the cache for all listed precisions, in parallel; failures are
    /// recorded and rethrown from candidates().
    void prepare(std::span<const double> eps_list);

    std::size_t samples() const {
        return samples_.size();
    }

private:
    Candidates compute(Eigen::Index index) const;

    std::vector<double> samples_;
    std::vector<double> normalized_;
    double norm_ = 1.0;
    double time_scale_ = 1.0;
    BeylkinMonzonOptions options_;
    HankelEigen eigen_;
    std::map<Eigen::Index, Candidates> cache_;
    std::map<Eigen::Index, std::string> failures_;
};

/// One-shot Hankel eigenvector -> polynomial roots -> Vandermonde fit.
Candidates beylkin_monzon(std::span<const double> samples, double eps, const BeylkinMonzonOptions &options = {});

struct PostprocessInfo {
    std::size_t candidates = 0;
    std::size_t nonpositive_dropped = 0;
    std::size_t truncated = 0;
    /// sum of |c| over valid terms removed by the term budget
    double truncated_weight = 0.0;
};

/// Drops terms with decay <= 0 (or non-finite), keeps the `max_terms` largest
/// |c|, converts exponents to the unit domain and rescales all weights by one
/// real factor so the sum has unit L2 norm.
ExpSum postprocess(const Candidates &candidates, int max_terms, PostprocessInfo *info = nullptr);

/// (integral_0^inf |psi~|^2)^{1/2}
double l2_norm(const ExpSum &sum);
cplx psi_tilde(const ExpSum &sum, double t);
double phi_tilde(const ExpSum &sum, double t);
/// integral_t^inf |psi~|^2
double survival_tilde(const ExpSum &sum, double t);
/// integral_0^inf t |psi~|^2 = integral_0^inf survival_tilde
double mean_wait_tilde(const ExpSum &sum);

/// Precomputed Hermitian form for repeated survival evaluation.
class SurvivalEvaluator {
public:
    explicit SurvivalEvaluator(const ExpSum &sum);
    double operator()(double t) const;

private:
    Eigen::VectorXcd exponents_;
    Eigen::MatrixXcd form_;
};

/// Same function expressed in a time coordinate stretched by `scale`
/// (t' = scale * t): exponents divide by scale, weights by sqrt(scale).
ExpSum rescale_time(const ExpSum &sum, double scale);

/// Multiplies every weight by exp(i phase).
ExpSum with_global_phase(const ExpSum &sum, double phase);

/// KS between the exact survival (over [0, T]) and the sum's survival on the unit domain.
KsReport ks_against(const WaitTimeDistribution &dist, const ExpSum &sum);

std::vector<double> log_grid(double lo, double hi, int count);
/// 45 points, four per decade, 1e-12 .. 1e-1.
std::vector<double> default_eps_grid();
/// 21 points, four per decade, 1e-3 .. 1e2 (compact-support study).
std::vector<double> wide_eps_grid();

struct ScanOptions {
    int samples = kDefaultSamples;
    /// window length T; defaults to default_domain(dist)
    double domain = 0.0;
    BeylkinMonzonOptions bm;
};

struct ScanEntry {
    double eps = 0.0;
    Eigen::Index eigen_index = 0;
    double eigenvalue = 0.0;
    double ks = 0.0;
    std::size_t terms = 0;
    double truncated_weight = 0.0;
    double residual = 0.0;
};

struct ScanFailure {
    double eps = 0.0;
    std::string message;
};

struct ScanResult {
    ExpSum best;
    double best_eps = 0.0;
    KsReport best_ks;
    std::vector<ScanEntry> report;
    std::vector<ScanFailure> failures;
    double domain = 0.0;
};

/// Runs the decomposition for every eps, scores each by KS against `dist`
/// and keeps the minimizer (smaller eps wins ties). Throws only when every
/// eps fails.
ScanResult scan_epsilon(const WaitTimeDistribution &dist, int max_terms, std::span<const double> eps_list,
                        const ScanOptions &options = {});

/// Same, reusing a decomposer built from sample_grid(dist, samples, domain).
ScanResult scan_epsilon(HankelDecomposer &decomposer, const WaitTimeDistribution &dist, int max_terms,
                        std::span<const double> eps_list);

/// Builds the decomposer scan_epsilon would use for these options.
HankelDecomposer make_decomposer(const WaitTimeDistribution &dist, const ScanOptions &options = {});

}  // namespace qcoarse

#endif  // QCOARSE_EXPSUM_HPP
