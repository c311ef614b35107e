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

#include "qcoarse/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "qcoarse/errors.hpp"
#include "qcoarse/parallel.hpp"

namespace qcoarse {

namespace {

// Denominator of the pairwise overlap integral of e^{z_j t}* e^{z_k t}.
cplx pair_denominator(const ExpTerm &j, const ExpTerm &k) {
    return {j.decay + k.decay, -(k.frequency - j.frequency)};
}

void require_decaying(const ExpSum &sum) {
    for (const auto &term : sum.terms) {
        if (!(term.decay > 0.0) || !std::isfinite(term.decay)) {
            throw DomainError("exponential sum has a non-decaying term");
        }
    }
}

Candidates candidates_from_roots(const Eigen::VectorXcd &roots, const VandermondeFit &fit, double weight_scale,
                                 double domain_scale, double time_scale) {
    Candidates out;
    out.domain_scale = domain_scale;
    out.time_scale = time_scale;
    out.residual = fit.residual;
    out.condition = fit.condition;
    out.truncated = fit.truncated;
    out.terms.reserve(static_cast<std::size_t>(roots.size()));
    for (Eigen::Index k = 0; k < roots.size(); ++k) {
        ExpTerm term;
        term.weight = fit.weights(k) * weight_scale;
        if (roots(k) == cplx(0.0)) {
            term.decay = std::numeric_limits<double>::infinity();
            term.frequency = 0.0;
        } else {
            const cplx lg = std::log(roots(k));
            term.decay = -lg.real();
            term.frequency = lg.imag();
        }
        out.terms.push_back(term);
    }
    return out;
}

}  // namespace

HankelDecomposer::HankelDecomposer(std::vector<double> samples, double time_scale, BeylkinMonzonOptions options)
    : samples_(std::move(samples)), time_scale_(time_scale), options_(options) {
    for (double v : samples_) {
        if (!std::isfinite(v)) {
            throw InputError("non-finite sample");
        }
    }
    double sq = 0.0;
    for (double v : samples_) {
        sq += v * v;
    }
    norm_ = std::sqrt(sq);
    if (!(norm_ > 0.0)) {
        throw NumericalFailure("all samples are zero");
    }
    normalized_.resize(samples_.size());
    std::transform(samples_.begin(), samples_.end(), normalized_.begin(), [&](double v) { return v / norm_; });
    eigen_ = hankel_eigen(normalized_);
}

Eigen::Index HankelDecomposer::select(double eps) const {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw DomainError("precision must be positive");
    }
    Eigen::Index best = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    if (eigen_.size > eigen_.block()) {
        best_gap = eps;  // implicit zero eigenvalue
    }
    for (Eigen::Index i = 0; i < eigen_.block(); ++i) {
        const double mag = std::abs(eigen_.values(i));
        const double gap = std::abs(mag - eps);
        if (gap < best_gap || (gap == best_gap && best >= 0 && mag < best_mag)) {
            best = i;
            best_gap = gap;
            best_mag = mag;
        }
    }
    return best;
}

double HankelDecomposer::eigenvalue(Eigen::Index index) const {
    return index < 0 ? 0.0 : eigen_.values(index);
}

Candidates HankelDecomposer::compute(Eigen::Index index) const {
    if (index < 0) {
        throw NumericalFailure("selected eigenvalue belongs to the null space of trailing zero samples");
    }
    const Eigen::VectorXd sigma = eigen_.full_vector(index);
    const Eigen::VectorXcd roots = polynomial_roots(sigma);
    const VandermondeFit fit = vandermonde_least_squares(roots, normalized_, options_.mode);
    for (Eigen::Index k = 0; k < fit.weights.size(); ++k) {
        if (!std::isfinite(fit.weights(k).real()) || !std::isfinite(fit.weights(k).imag())) {
            throw NumericalFailure("Vandermonde solve produced non-finite weights", fit.residual);
        }
    }
    Candidates out = candidates_from_roots(roots, fit, norm_, static_cast<double>(samples_.size() - 1), time_scale_);
    out.eigenvalue = eigen_.values(index);
    return out;
}

const Candidates &HankelDecomposer::candidates(Eigen::Index index) {
    if (auto it = cache_.find(index); it != cache_.end()) {
        return it->second;
    }
    if (auto it = failures_.find(index); it != failures_.end()) {
        throw NumericalFailure(it->second);
    }
    return cache_.emplace(index, compute(index)).first->second;
}

void HankelDecomposer::prepare(std::span<const double> eps_list) {
    std::vector<Eigen::Index> todo;
    for (double eps : eps_list) {
        const Eigen::Index idx = select(eps);
        if (!cache_.contains(idx) && !failures_.contains(idx) &&
            std::find(todo.begin(), todo.end(), idx) == todo.end()) {
            todo.push_back(idx);
        }
    }
    std::vector<std::optional<Candidates>> slots(todo.size());
    std::vector<std::string> errors(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) {
        try {
            slots[i] = compute(todo[i]);
        } catch (const NumericalFailure &e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
        if (slots[i]) {
            cache_.emplace(todo[i], std::move(*slots[i]));
        } else {
            failures_.emplace(todo[i], errors[i]);
        }
    }
}

Candidates beylkin_monzon(std::span<const double> samples, double eps, const BeylkinMonzonOptions &options) {
    HankelDecomposer decomposer(std::vector<double>(samples.begin(), samples.end()), 1.0, options);
    return decomposer.candidates_for(eps);
}

ExpSum postprocess(const Candidates &candidates, int max_terms, PostprocessInfo *info) {
    if (max_terms < 1) {
        throw DomainError("term budget must be at least one");
    }
    PostprocessInfo local;
    local.candidates = candidates.terms.size();
    std::vector<ExpTerm> kept;
    for (const auto &raw : candidates.terms) {
        ExpTerm term = raw;
        term.decay *= candidates.domain_scale;
        term.frequency *= candidates.domain_scale;
        const bool finite = std::isfinite(term.decay) && std::isfinite(term.frequency) &&
                            std::isfinite(term.weight.real()) && std::isfinite(term.weight.imag());
        if (!finite || term.decay <= 0.0 || term.weight == cplx(0.0)) {
            ++local.nonpositive_dropped;
            continue;
        }
        kept.push_back(term);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const ExpTerm &a, const ExpTerm &b) {
        const double ma = std::abs(a.weight), mb = std::abs(b.weight);
        if (ma != mb) return ma > mb;
        if (a.decay != b.decay) return a.decay < b.decay;
        return a.frequency < b.frequency;
    });
    const auto budget = static_cast<std::size_t>(max_terms);
    if (kept.size() > budget) {
        local.truncated = kept.size() - budget;
        for (std::size_t i = budget; i < kept.size(); ++i) {
            local.truncated_weight += std::abs(kept[i].weight);
        }
        kept.resize(budget);
    }
    if (info != nullptr) {
        *info = local;
    }
    if (kept.empty()) {
        throw EmptyDecomposition("no decaying terms survived post-processing");
    }
    ExpSum sum;
    sum.terms = std::move(kept);
    sum.domain_scale = candidates.domain_scale;
    sum.time_scale = candidates.time_scale;
    const double norm = l2_norm(sum);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw EmptyDecomposition("surviving terms have no finite L2 norm", norm);
    }
    for (auto &term : sum.terms) {
        term.weight /= norm;
    }
    return sum;
}

double l2_norm(const ExpSum &sum) {
    require_decaying(sum);
    cplx total = 0.0;
    for (const auto &j : sum.terms) {
        for (const auto &k : sum.terms) {
            total += std::conj(j.weight) * k.weight / pair_denominator(j, k);
        }
    }
    return std::sqrt(std::max(total.real(), 0.0));
}

cplx psi_tilde(const ExpSum &sum, double t) {
    if (t < 0.0) {
        throw DomainError("negative time");
    }
    cplx total = 0.0;
    for (const auto &term : sum.terms) {
        total += term.weight * std::exp(term.exponent() * t);
    }
    return total;
}

double phi_tilde(const ExpSum &sum, double t) {
    return std::norm(psi_tilde(sum, t));
}

double survival_tilde(const ExpSum &sum, double t) {
    if (t < 0.0) {
        throw DomainError("negative time");
    }
    return SurvivalEvaluator(sum)(t);
}

double mean_wait_tilde(const ExpSum &sum) {
    require_decaying(sum);
    cplx total = 0.0;
    for (const auto &j : sum.terms) {
        for (const auto &k : sum.terms) {
            const cplx a = pair_denominator(j, k);
            total += std::conj(j.weight) * k.weight / (a * a);
        }
    }
    return total.real();
}

SurvivalEvaluator::SurvivalEvaluator(const ExpSum &sum) {
    require_decaying(sum);
    const auto n = static_cast<Eigen::Index>(sum.size());
    exponents_.resize(n);
    form_.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto &tj = sum.terms[static_cast<std::size_t>(j)];
        exponents_(j) = tj.exponent();
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto &tk = sum.terms[static_cast<std::size_t>(k)];
            form_(j, k) = std::conj(tj.weight) * tk.weight / pair_denominator(tj, tk);
        }
    }
}

double SurvivalEvaluator::operator()(double t) const {
    const Eigen::VectorXcd u = (exponents_ * t).array().exp();
    const cplx value = u.dot(form_ * u);
    return value.real();
}

ExpSum rescale_time(const ExpSum &sum, double scale) {
    if (!(scale > 0.0)) {
        throw DomainError("time scale must be positive");
    }
    ExpSum out = sum;
    const double amp = 1.0 / std::sqrt(scale);
    for (auto &term : out.terms) {
        term.weight *= amp;
        term.decay /= scale;
        term.frequency /= scale;
    }
    out.time_scale = sum.time_scale / scale;
    return out;
}

ExpSum with_global_phase(const ExpSum &sum, double phase) {
    ExpSum out = sum;
    const cplx rot = std::polar(1.0, phase);
    for (auto &term : out.terms) {
        term.weight *= rot;
    }
    return out;
}

KsReport ks_against(const WaitTimeDistribution &dist, const ExpSum &sum) {
    const SurvivalEvaluator tilde(sum);
    const double scale = sum.time_scale;
    return ks_survival([&](double s) { return survival(dist, scale * s); }, [&](double s) { return tilde(s); });
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
        throw DomainError("invalid logarithmic grid");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    }
    return out;
}

std::vector<double> default_eps_grid() {
    return log_grid(1e-12, 1e-1, 45);
}

std::vector<double> wide_eps_grid() {
    return log_grid(1e-3, 1e2, 21);
}

HankelDecomposer make_decomposer(const WaitTimeDistribution &dist, const ScanOptions &options) {
    const double domain = options.domain > 0.0 ? options.domain : default_domain(dist);
    return HankelDecomposer(sample_grid(dist, options.samples, domain), domain, options.bm);
}

ScanResult scan_epsilon(const WaitTimeDistribution &dist, int max_terms, std::span<const double> eps_list,
                        const ScanOptions &options) {
    HankelDecomposer decomposer = make_decomposer(dist, options);
    return scan_epsilon(decomposer, dist, max_terms, eps_list);
}

ScanResult scan_epsilon(HankelDecomposer &decomposer, const WaitTimeDistribution &dist, int max_terms,
                        std::span<const double> eps_list) {
    if (eps_list.empty()) {
        throw DomainError("empty precision list");
    }
    decomposer.prepare(eps_list);

    struct Slot {
        std::optional<ExpSum> sum;
        ScanEntry entry;
        KsReport ks;
        std::string error;
    };
    std::vector<Slot> slots(eps_list.size());
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        slots[i].entry.eps = eps_list[i];
        slots[i].entry.eigen_index = decomposer.select(eps_list[i]);
        slots[i].entry.eigenvalue = decomposer.eigenvalue(slots[i].entry.eigen_index);
    }
    // Cache lookups mutate nothing after prepare(), so reads are safe here.
    std::vector<const Candidates *> sources(eps_list.size(), nullptr);
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        try {
            sources[i] = &decomposer.candidates(slots[i].entry.eigen_index);
        } catch (const NumericalFailure &e) {
            slots[i].error = e.what();
        }
    }
    parallel_for(eps_list.size(), [&](std::size_t i) {
        if (sources[i] == nullptr) return;
        Slot &slot = slots[i];
        try {
            PostprocessInfo info;
            ExpSum sum = postprocess(*sources[i], max_terms, &info);
            slot.ks = ks_against(dist, sum);
            slot.entry.ks = slot.ks.statistic;
            slot.entry.terms = sum.size();
            slot.entry.truncated_weight = info.truncated_weight;
            slot.entry.residual = sources[i]->residual;
            slot.sum = std::move(sum);
        } catch (const NumericalFailure &e) {
            slot.error = e.what();
        } catch (const DomainError &e) {
            slot.error = e.what();
        }
    });

    ScanResult result;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot &slot = slots[i];
        if (!slot.sum || !std::isfinite(slot.entry.ks)) {
            result.failures.push_back({slot.entry.eps, slot.error.empty() ? "non-finite KS" : slot.error});
            continue;
        }
        result.report.push_back(slot.entry);
        if (!best) {
            best = i;
            continue;
        }
        const Slot &cur = slots[*best];
        if (slot.entry.ks < cur.entry.ks || (slot.entry.ks == cur.entry.ks && slot.entry.eps < cur.entry.eps)) {
            best = i;
        }
    }
    if (!best) {
        throw NumericalFailure("every precision in the scan failed: " +
                               (result.failures.empty() ? std::string() : result.failures.front().message));
    }
    result.best = *slots[*best].sum;
    result.best_eps = slots[*best].entry.eps;
    result.best_ks = slots[*best].ks;
    result.domain = result.best.time_scale;
    return result;
}

}  // namespace qcoarse
