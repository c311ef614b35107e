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

#include "qcoarse/hsmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "qcoarse/errors.hpp"
#include "qcoarse/metrics.hpp"
#include "qcoarse/simulate.hpp"

namespace qcoarse {

namespace {

constexpr double kRowTolerance = 1e-9;

std::string cache_key(const WaitTimeDistribution &dwell) {
    const WaitTimeDistribution base = dwell.with_time_unit(1.0);
    std::string key = base.describe();
    if (const auto *tab = std::get_if<Tabulated>(&base.kind())) {
        std::uint64_t hash = 1469598103934665603ULL;
        auto mix = [&](const std::vector<double> &v) {
            for (double x : v) {
                unsigned char bytes[sizeof(double)];
                std::memcpy(bytes, &x, sizeof(double));
                for (unsigned char b : bytes) {
                    hash = (hash ^ b) * 1099511628211ULL;
                }
            }
        };
        mix(tab->times);
        mix(tab->densities);
        key += "#" + std::to_string(hash);
    }
    return key;
}

// Repeated squaring: returns m^(2^squarings).
Eigen::MatrixXd power_of_two(Eigen::MatrixXd m, int squarings) {
    for (int i = 0; i < squarings; ++i) {
        m = (m * m).eval();
        // Keep rows stochastic so rounding cannot compound.
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double s = m.row(r).sum();
            if (s > 0.0) m.row(r) /= s;
        }
    }
    return m;
}

std::vector<std::vector<int>> outgoing(const Hsmm &h) {
    std::vector<std::vector<int>> out(h.modes.size());
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        if (h.edges[e].prob > 0.0) {
            out[static_cast<std::size_t>(h.edges[e].from)].push_back(static_cast<int>(e));
        }
    }
    return out;
}

// Composite 8-point Gauss-Legendre on [a, b].
template <typename F>
double gauss_legendre(F f, double a, double b, int panels) {
    static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
    static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                0.1012285362903763};
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < x.size(); ++i) {
            total += w[i] * half * (f(mid - half * x[i]) + f(mid + half * x[i]));
        }
    }
    return total;
}

}  // namespace

int Hsmm::mode_index(const std::string &name) const {
    const auto it = std::find(modes.begin(), modes.end(), name);
    if (it == modes.end()) {
        throw InputError("unknown mode '" + name + "'");
    }
    return static_cast<int>(it - modes.begin());
}

int Hsmm::event_index(const std::string &name) const {
    const auto it = std::find(events.begin(), events.end(), name);
    if (it == events.end()) {
        throw InputError("unknown event '" + name + "'");
    }
    return static_cast<int>(it - events.begin());
}

ValidationReport validate(const Hsmm &h) {
    ValidationReport report;
    if (h.modes.empty() || h.events.empty()) {
        report.errors.push_back("process needs at least one mode and one event");
        return report;
    }
    const auto nm = static_cast<int>(h.modes.size());
    const auto nx = static_cast<int>(h.events.size());
    std::vector<double> rows(h.modes.size(), 0.0);
    std::set<std::tuple<int, int, int>> seen;
    std::map<std::pair<int, int>, std::set<int>> targets;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        const Edge &e = h.edges[i];
        const std::string where = "edge " + std::to_string(i);
        if (e.from < 0 || e.from >= nm || e.to < 0 || e.to >= nm || e.symbol < 0 || e.symbol >= nx) {
            report.errors.push_back(where + " refers to an unknown mode or event");
            continue;
        }
        if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
            report.errors.push_back(where + " has probability outside [0, 1]");
            continue;
        }
        if (!seen.insert({e.from, e.symbol, e.to}).second) {
            report.errors.push_back(where + " duplicates an earlier (mode, event, next mode) triple");
        }
        rows[static_cast<std::size_t>(e.from)] += e.prob;
        if (e.prob > 0.0) {
            targets[{e.from, e.symbol}].insert(e.to);
            try {
                const double s0 = survival(e.dwell, 0.0);
                const double mean = mean_wait(e.dwell);
                if (std::abs(s0 - 1.0) > 1e-9 || !(mean > 0.0) || !std::isfinite(mean)) {
                    report.errors.push_back(where + " dwell is not a normalized law with finite mean");
                }
            } catch (const std::exception &ex) {
                report.errors.push_back(where + " dwell: " + ex.what());
            }
        }
    }
    for (int g = 0; g < nm; ++g) {
        const double r = rows[static_cast<std::size_t>(g)];
        if (std::abs(r - 1.0) > kRowTolerance) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "transition probabilities out of mode '" << h.modes[static_cast<std::size_t>(g)] << "' sum to "
                << r;
            report.errors.push_back(msg.str());
        }
    }
    for (const auto &[key, next] : targets) {
        if (next.size() > 1) {
            report.violations.push_back(key);
            report.warnings.push_back("mode '" + h.modes[static_cast<std::size_t>(key.first)] + "' with event '" +
                                      h.events[static_cast<std::size_t>(key.second)] +
                                      "' reaches several next modes; next mode not fixed by (mode, event)");
        }
    }
    return report;
}

double modal_survival(const Hsmm &h, int mode, double t) {
    if (t < 0.0) {
        throw DomainError("negative time");
    }
    if (mode < 0 || mode >= static_cast<int>(h.modes.size())) {
        throw DomainError("mode index out of range");
    }
    double total = 0.0;
    for (const Edge &e : h.edges) {
        if (e.from == mode && e.prob > 0.0) {
            total += e.prob * survival(e.dwell, t / e.dwell.time_unit());
        }
    }
    return total;
}

std::vector<double> stationary_modes(const Hsmm &h, const std::optional<std::vector<double>> &initial) {
    const auto n = static_cast<Eigen::Index>(h.modes.size());
    if (n == 0) {
        throw InputError("process has no modes");
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (const Edge &e : h.edges) {
        t(e.from, e.to) += e.prob;
    }
    // Closed communicating classes from the transitive closure.
    Eigen::MatrixXi reach = Eigen::MatrixXi::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (t(i, j) > 0.0) reach(i, j) = 1;
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (reach(i, k) && reach(k, j)) reach(i, j) = 1;
            }
        }
    }
    std::vector<std::vector<int>> closed;
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (assigned[static_cast<std::size_t>(i)]) continue;
        std::vector<int> cls;
        bool is_closed = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (reach(i, j) && reach(j, i)) {
                cls.push_back(static_cast<int>(j));
                assigned[static_cast<std::size_t>(j)] = true;
            } else if (reach(i, j)) {
                is_closed = false;
            }
        }
        if (is_closed) closed.push_back(cls);
    }
    if (closed.size() > 1 && !initial) {
        std::string msg = "mode chain has several closed classes:";
        for (const auto &cls : closed) {
            msg += " {";
            for (std::size_t k = 0; k < cls.size(); ++k) {
                msg += (k ? "," : "") + h.modes[static_cast<std::size_t>(cls[k])];
            }
            msg += "}";
        }
        throw InputError(msg + "; pass an initial distribution");
    }
    Eigen::RowVectorXd start = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    if (initial) {
        if (static_cast<Eigen::Index>(initial->size()) != n) {
            throw InputError("initial distribution has the wrong length");
        }
        for (Eigen::Index i = 0; i < n; ++i) start(i) = (*initial)[static_cast<std::size_t>(i)];
        const double s = start.sum();
        if (!(s > 0.0) || (start.array() < 0.0).any()) {
            throw InputError("initial distribution must be non-negative with positive mass");
        }
        start /= s;
    }
    // The lazy chain (I + T) / 2 is aperiodic and its limit is the Cesaro
    // limit of T.
    const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + t);
    const Eigen::MatrixXd limit = power_of_two(lazy, 64);
    Eigen::RowVectorXd pi = start * limit;
    pi /= pi.sum();
    return {pi.data(), pi.data() + pi.size()};
}

std::vector<double> stationary_event_weights(const Hsmm &h, const StationaryOptions &options) {
    const std::vector<double> pi = stationary_modes(h, options.initial);
    std::vector<double> w(h.edges.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        const Edge &e = h.edges[i];
        if (!(e.prob > 0.0)) continue;
        w[i] = pi[static_cast<std::size_t>(e.from)] * e.prob;
        if (options.dwell_weighted) {
            w[i] *= mean_wait(e.dwell) * e.dwell.time_unit();
        }
        total += w[i];
    }
    for (double &v : w) v /= total;
    return w;
}

DecompositionCache::DecompositionCache(int max_terms, std::vector<double> eps_list, ScanOptions options)
    : max_terms_(max_terms), eps_(std::move(eps_list)), options_(options) {
}

const ScanResult &DecompositionCache::get(const WaitTimeDistribution &dwell) {
    const std::string key = cache_key(dwell);
    if (auto it = results_.find(key); it != results_.end()) {
        return it->second;
    }
    return results_.emplace(key, scan_epsilon(dwell.with_time_unit(1.0), max_terms_, eps_, options_)).first->second;
}

CompressedHsmm compress(const Hsmm &h, int max_terms, const CompressOptions &options) {
    const ValidationReport report = validate(h);
    if (!report.valid()) {
        throw InputError("invalid process: " + report.errors.front());
    }
    if (!report.strong_condition()) {
        throw InputError("next mode is not determined by (mode, event); " + report.warnings.front() +
                         ". Use interference_diagnostic for such processes");
    }
    DecompositionCache local(max_terms, options.eps_list, options.scan);
    DecompositionCache &cache = options.cache != nullptr ? *options.cache : local;
    if (cache.max_terms() != max_terms) {
        throw InputError("decomposition cache was built for a different term budget");
    }

    CompressedHsmm out;
    out.source = h;
    out.dt = options.dt;
    out.ancilla = 1 + static_cast<Eigen::Index>(h.events.size());
    const auto out_edges = outgoing(h);
    std::vector<int> slot(h.edges.size(), -1);
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        if (!(h.edges[i].prob > 0.0)) continue;
        slot[i] = static_cast<int>(out.edges.size());
        out.edges.push_back(static_cast<int>(i));
        const Edge &e = h.edges[i];
        try {
            const ScanResult &scan = cache.get(e.dwell);
            out.unit_sums.push_back(scan.best);
            out.edge_ks.push_back(scan.best_ks.statistic);
            out.edge_eps.push_back(scan.best_eps);
        } catch (const NumericalFailure &ex) {
            throw NumericalFailure("edge " + h.modes[static_cast<std::size_t>(e.from)] + " -" +
                                       h.events[static_cast<std::size_t>(e.symbol)] + "-> " +
                                       h.modes[static_cast<std::size_t>(e.to)] + ": " + ex.what(),
                                   ex.residual);
        }
        const ExpSum &unit = out.unit_sums.back();
        out.clock_sums.push_back(rescale_time(unit, unit.time_scale * e.dwell.time_unit()));
    }

    const std::size_t ne = out.edges.size();
    std::vector<Eigen::VectorXcd> scaled(ne);
    std::vector<Eigen::VectorXcd> steps(ne);
    std::vector<Eigen::VectorXd> amps(ne);
    out.etas.resize(ne);
    out.offsets.resize(ne);
    Eigen::Index total = 0;
    for (std::size_t k = 0; k < ne; ++k) {
        const GramMatrix g = gram_matrix(out.clock_sums[k], out.dt);
        scaled[k] = g.scaled_weights;
        steps[k] = g.step_factors;
        amps[k] = g.event_amplitudes;
        out.etas[k] = g.eta;
        out.offsets[k] = total;
        total += static_cast<Eigen::Index>(out.clock_sums[k].size());
    }
    out.generator_count = total;

    // Pairwise step overlaps between edges with the same event symbol.
    std::vector<std::vector<Eigen::MatrixXcd>> cross(ne, std::vector<Eigen::MatrixXcd>(ne));
    for (std::size_t a = 0; a < ne; ++a) {
        for (std::size_t b = 0; b < ne; ++b) {
            if (h.edges[static_cast<std::size_t>(out.edges[a])].symbol ==
                h.edges[static_cast<std::size_t>(out.edges[b])].symbol) {
                cross[a][b] = step_overlap(out.clock_sums[a], out.clock_sums[b], out.dt);
            }
        }
    }

    // Reset overlaps solve Q = T(Q) with unit diagonal. The off-diagonal part
    // is affine, q = A q + b; along eigenvalue-1 directions of A the fixed
    // point is not unique and we keep the component of the all-ones start
    // (every reset state initially identical), elsewhere the unique value.
    const auto nm = static_cast<Eigen::Index>(h.modes.size());
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    Eigen::MatrixXi pair_index = Eigen::MatrixXi::Constant(nm, nm, -1);
    for (Eigen::Index g = 0; g < nm; ++g) {
        for (Eigen::Index k = 0; k < nm; ++k) {
            if (g != k) {
                pair_index(g, k) = static_cast<int>(pairs.size());
                pairs.emplace_back(g, k);
            }
        }
    }
    const auto np = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXcd amap = Eigen::MatrixXcd::Zero(np, np);
    Eigen::VectorXcd bvec = Eigen::VectorXcd::Zero(np);
    for (std::size_t a = 0; a < ne; ++a) {
        const Edge &ea = h.edges[static_cast<std::size_t>(out.edges[a])];
        for (std::size_t b = 0; b < ne; ++b) {
            const Edge &eb = h.edges[static_cast<std::size_t>(out.edges[b])];
            if (ea.symbol != eb.symbol || ea.from == eb.from) continue;
            const cplx coef =
                std::sqrt(ea.prob * eb.prob) * out.etas[a] * out.etas[b] * scaled[a].dot(cross[a][b] * scaled[b]);
            const int row = pair_index(ea.from, eb.from);
            if (ea.to == eb.to) {
                bvec(row) += coef;
            } else {
                amap(row, pair_index(ea.to, eb.to)) += coef;
            }
        }
    }
    Eigen::VectorXcd qoff = Eigen::VectorXcd::Zero(np);
    if (np > 0) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(amap);
        const Eigen::MatrixXcd &w = es.eigenvectors();
        const auto lu = w.fullPivLu();
        const Eigen::VectorXcd beta = lu.solve(bvec);
        const Eigen::VectorXcd kappa = lu.solve(Eigen::VectorXcd::Ones(np));
        Eigen::VectorXcd alpha(np);
        for (Eigen::Index i = 0; i < np; ++i) {
            const cplx lambda = es.eigenvalues()(i);
            alpha(i) = std::abs(lambda - 1.0) < 1e-8 ? kappa(i) : beta(i) / (1.0 - lambda);
        }
        qoff = w * alpha;
        const double fixed_defect = (amap * qoff + bvec - qoff).cwiseAbs().maxCoeff();
        if (!(fixed_defect <= 1e-9)) {
            throw InconsistentDecomposition("reset-state overlaps have no consistent fixed point", fixed_defect);
        }
    }
    out.overlaps = Eigen::MatrixXcd::Identity(nm, nm);
    for (Eigen::Index i = 0; i < np; ++i) {
        out.overlaps(pairs[static_cast<std::size_t>(i)].first, pairs[static_cast<std::size_t>(i)].second) = qoff(i);
    }
    out.overlaps = (0.5 * (out.overlaps + out.overlaps.adjoint())).eval();

    out.gram = Eigen::MatrixXcd::Zero(total, total);
    for (std::size_t a = 0; a < ne; ++a) {
        const Edge &ea = h.edges[static_cast<std::size_t>(out.edges[a])];
        for (std::size_t b = 0; b < ne; ++b) {
            const Edge &eb = h.edges[static_cast<std::size_t>(out.edges[b])];
            if (ea.symbol != eb.symbol) continue;
            out.gram.block(out.offsets[a], out.offsets[b], cross[a][b].rows(), cross[a][b].cols()) =
                (out.etas[a] * out.etas[b] * out.overlaps(ea.to, eb.to)) * cross[a][b];
        }
    }
    out.gram = (0.5 * (out.gram + out.gram.adjoint())).eval();
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.gram, Eigen::EigenvaluesOnly);
        const double tr = out.gram.trace().real();
        if (es.eigenvalues()(0) < -kRankThreshold * tr) {
            throw NumericalFailure("joint Gram matrix is not positive semidefinite", es.eigenvalues()(0));
        }
    }
    out.generators = embed_generators(out.gram);
    out.dimension = out.generators.rows();

    out.resets = Eigen::MatrixXcd::Zero(out.dimension, nm);
    for (std::size_t a = 0; a < ne; ++a) {
        const Edge &ea = h.edges[static_cast<std::size_t>(out.edges[a])];
        const Eigen::Index n = static_cast<Eigen::Index>(scaled[a].size());
        out.resets.col(ea.from) += std::sqrt(ea.prob) * (out.generators.middleCols(out.offsets[a], n) * scaled[a]);
    }
    for (Eigen::Index g = 0; g < nm; ++g) {
        const double norm = out.resets.col(g).norm();
        if (std::abs(norm - 1.0) > 1e-8) {
            throw InconsistentDecomposition("reset state of mode '" + h.modes[static_cast<std::size_t>(g)] +
                                                "' is not normalized",
                                            std::abs(norm - 1.0));
        }
        out.resets.col(g) /= norm;
    }

    const Eigen::Index d = out.dimension;
    const Eigen::Index anc = out.ancilla;
    Eigen::MatrixXcd images = Eigen::MatrixXcd::Zero(d * anc, total);
    for (std::size_t a = 0; a < ne; ++a) {
        const Edge &ea = h.edges[static_cast<std::size_t>(out.edges[a])];
        const Eigen::Index n = static_cast<Eigen::Index>(scaled[a].size());
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index col = out.offsets[a] + j;
            const double fire = out.etas[a] * amps[a](j);
            for (Eigen::Index m = 0; m < d; ++m) {
                images(m * anc, col) = steps[a](j) * out.generators(m, col);
                images(m * anc + 1 + ea.symbol, col) = fire * out.resets(m, ea.to);
            }
        }
    }
    out.unitary = assemble_unitary(out.generators, images, anc);
    return out;
}

MemoryState memory_state(const CompressedHsmm &model, int mode, double t) {
    if (t < 0.0) {
        throw DomainError("negative time");
    }
    MemoryState out;
    out.state = Eigen::VectorXcd::Zero(model.dimension);
    for (std::size_t a = 0; a < model.edges.size(); ++a) {
        const Edge &e = model.source.edges[static_cast<std::size_t>(model.edges[a])];
        if (e.from != mode) continue;
        const ExpSum &sum = model.clock_sums[a];
        const auto n = static_cast<Eigen::Index>(sum.size());
        Eigen::VectorXcd coeff(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const ExpTerm &term = sum.terms[static_cast<std::size_t>(j)];
            coeff(j) = term.weight / std::sqrt(2.0 * term.decay) * std::exp(term.exponent() * t);
        }
        out.state += std::sqrt(e.prob) * (model.generators.middleCols(model.offsets[a], n) * coeff);
    }
    out.norm_squared = out.state.squaredNorm();
    const double norm = std::sqrt(out.norm_squared);
    if (!(norm >= 1e-14)) {
        throw TailUnderflow("memory state vanished", norm);
    }
    out.state /= norm;
    return out;
}

double averaged_ks(const CompressedHsmm &model, const StationaryOptions &options) {
    const std::vector<double> all = stationary_event_weights(model.source, options);
    std::vector<double> w;
    for (int e : model.edges) {
        w.push_back(all[static_cast<std::size_t>(e)]);
    }
    return averaged_ks(std::span<const double>(w), std::span<const double>(model.edge_ks));
}

double averaged_ks(const Hsmm &h, DecompositionCache &cache, const StationaryOptions &options) {
    const std::vector<double> all = stationary_event_weights(h, options);
    std::vector<double> w, ks;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        if (!(h.edges[i].prob > 0.0)) continue;
        w.push_back(all[i]);
        ks.push_back(cache.get(h.edges[i].dwell).best_ks.statistic);
    }
    return averaged_ks(std::span<const double>(w), std::span<const double>(ks));
}

double density_overlap(const ExpSum &a, const ExpSum &b) {
    cplx total = 0.0;
    for (const auto &ta : a.terms) {
        for (const auto &tb : a.terms) {
            const cplx wa = std::conj(ta.weight) * tb.weight;
            const cplx za = std::conj(ta.exponent()) + tb.exponent();
            for (const auto &tc : b.terms) {
                for (const auto &td : b.terms) {
                    const cplx z = za + std::conj(tc.exponent()) + td.exponent();
                    total += wa * std::conj(tc.weight) * td.weight / -z;
                }
            }
        }
    }
    return total.real();
}

cplx wave_overlap(const ExpSum &a, const ExpSum &b) {
    cplx total = 0.0;
    for (const auto &ta : a.terms) {
        for (const auto &tb : b.terms) {
            total += std::conj(ta.weight) * tb.weight / -(std::conj(ta.exponent()) + tb.exponent());
        }
    }
    return total;
}

double exact_density_overlap(const WaitTimeDistribution &a, const WaitTimeDistribution &b) {
    const double ua = a.time_unit(), ub = b.time_unit();
    const auto [la, ha] = support(a);
    const auto [lb, hb] = support(b);
    const double lo = std::max(la * ua, lb * ub);
    double hi = std::min(ha * ua, hb * ub);
    if (!std::isfinite(hi)) {
        hi = std::min(std::isfinite(ha) ? ha * ua : tail_cutoff(a, 1e-14) * ua,
                      std::isfinite(hb) ? hb * ub : tail_cutoff(b, 1e-14) * ub);
    }
    if (!(hi > lo)) {
        return 0.0;
    }
    auto f = [&](double t) { return pdf(a, t / ua) / ua * pdf(b, t / ub) / ub; };
    return gauss_legendre(f, lo, hi, 2000);
}

std::vector<InterferenceEntry> interference_diagnostic(const Hsmm &h, const std::vector<ExpSum> &clock_sums) {
    if (clock_sums.size() != h.edges.size()) {
        throw InputError("one exponential sum per edge is required");
    }
    std::vector<InterferenceEntry> out;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        const Edge &a = h.edges[i];
        if (!(a.prob > 0.0)) continue;
        for (std::size_t j = i + 1; j < h.edges.size(); ++j) {
            const Edge &b = h.edges[j];
            if (!(b.prob > 0.0) || a.from != b.from || a.symbol != b.symbol || a.to == b.to) continue;
            InterferenceEntry entry;
            entry.mode = a.from;
            entry.symbol = a.symbol;
            entry.first = static_cast<int>(i);
            entry.second = static_cast<int>(j);
            entry.approx_density_overlap = density_overlap(clock_sums[i], clock_sums[j]);
            entry.approx_wave_overlap = wave_overlap(clock_sums[i], clock_sums[j]);
            entry.exact_density_overlap = exact_density_overlap(a.dwell, b.dwell);
            out.push_back(entry);
        }
    }
    return out;
}

std::vector<InterferenceEntry> interference_diagnostic(const Hsmm &h, int max_terms,
                                                       const std::vector<double> &eps_list, const ScanOptions &scan) {
    DecompositionCache cache(max_terms, eps_list, scan);
    std::vector<ExpSum> sums;
    sums.reserve(h.edges.size());
    for (const Edge &e : h.edges) {
        if (!(e.prob > 0.0)) {
            sums.emplace_back();
            continue;
        }
        const ExpSum &unit = cache.get(e.dwell).best;
        sums.push_back(rescale_time(unit, unit.time_scale * e.dwell.time_unit()));
    }
    return interference_diagnostic(h, sums);
}

Hsmm equalize_rates(Hsmm h, double rate) {
    if (!(rate > 0.0)) {
        throw DomainError("mean firing rate must be positive");
    }
    for (Edge &e : h.edges) {
        e.dwell = e.dwell.with_time_unit(1.0 / (rate * mean_wait(e.dwell)));
    }
    return h;
}

Hsmm example_process(double p, double q, double rate) {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
        throw DomainError("p and q must lie in [0, 1]");
    }
    const auto ap = WaitTimeDistribution::alternating_poisson(1.0);
    const auto bg = WaitTimeDistribution::bimodal_gaussian_default();
    Hsmm h;
    h.modes = {"A", "B"};
    h.events = {"x", "y"};
    auto add = [&](int from, int symbol, int to, double prob, const WaitTimeDistribution &dwell) {
        if (prob > 0.0) {
            h.edges.push_back(Edge{from, symbol, to, prob, dwell});
        }
    };
    add(0, 0, 1, 1.0 - p, ap);
    add(0, 1, 0, p, bg);
    add(1, 0, 0, 1.0 - q, ap);
    add(1, 1, 1, q, bg);
    return equalize_rates(std::move(h), rate);
}

Hsmm split_uniform_process(double tau) {
    if (!(tau > 0.0)) {
        throw DomainError("tau must be positive");
    }
    Hsmm h;
    h.modes = {"g", "g1", "g2"};
    h.events = {"x"};
    h.edges.push_back(Edge{0, 0, 1, 0.5, WaitTimeDistribution::top_hat(0.5 * tau, 0.5 * tau)});
    h.edges.push_back(Edge{0, 0, 2, 0.5, WaitTimeDistribution::top_hat(tau, 0.5 * tau)});
    h.edges.push_back(Edge{1, 0, 0, 1.0, WaitTimeDistribution::exponential(1.0 / tau)});
    h.edges.push_back(Edge{2, 0, 0, 1.0, WaitTimeDistribution::exponential(1.0 / tau)});
    return h;
}

HsmmTrajectory run_trajectory(const CompressedHsmm &model, int start_mode, std::uint64_t seed,
                              long long target_events, long long max_steps) {
    const auto nm = static_cast<int>(model.source.modes.size());
    if (start_mode < 0 || start_mode >= nm) {
        throw DomainError("start mode out of range");
    }
    const auto nx = static_cast<int>(model.source.events.size());
    std::vector<int> next(static_cast<std::size_t>(nm * nx), -1);
    for (int e : model.edges) {
        const Edge &edge = model.source.edges[static_cast<std::size_t>(e)];
        next[static_cast<std::size_t>(edge.from * nx + edge.symbol)] = edge.to;
    }
    std::vector<Eigen::MatrixXcd> blocks;
    for (Eigen::Index a = 0; a < model.ancilla; ++a) {
        blocks.push_back(model.block(a));
    }
    std::mt19937_64 rng(seed);
    HsmmTrajectory out;
    out.seed = seed;
    int mode = start_mode;
    Eigen::VectorXcd s = model.resets.col(mode);
    std::vector<Eigen::VectorXcd> branch(blocks.size());
    std::vector<double> probs(blocks.size());
    long long since = 0;
    for (long long step = 0; step < max_steps; ++step) {
        branch[0].noalias() = blocks[0] * s;
        probs[0] = branch[0].squaredNorm();
        ++since;
        ++out.steps;
        double u = uniform01(rng);
        if (u < probs[0]) {
            s = branch[0] / std::sqrt(probs[0]);
            continue;
        }
        // Event branches are only needed once the no-event outcome is rejected.
        double sum = probs[0];
        for (std::size_t a = 1; a < blocks.size(); ++a) {
            branch[a].noalias() = blocks[a] * s;
            probs[a] = branch[a].squaredNorm();
            sum += probs[a];
        }
        out.max_probability_defect = std::max(out.max_probability_defect, std::abs(sum - 1.0));
        u -= probs[0];
        std::size_t pick = 1;
        while (pick + 1 < probs.size() && u >= probs[pick]) {
            u -= probs[pick];
            ++pick;
        }
        if (probs[pick] <= 0.0) {
            throw NumericalFailure("sampled an outcome with zero probability");
        }
        const int symbol = static_cast<int>(pick) - 1;
        const int to = next[static_cast<std::size_t>(mode * nx + symbol)];
        if (to < 0) {
            throw NumericalFailure("event without a matching edge was emitted");
        }
        const Eigen::VectorXcd post = branch[pick] / std::sqrt(probs[pick]);
        out.max_reset_deviation =
            std::max(out.max_reset_deviation, 1.0 - std::abs(model.resets.col(to).dot(post)));
        out.modes.push_back(mode);
        out.symbols.push_back(symbol);
        out.waits.push_back(since);
        since = 0;
        mode = to;
        s = model.resets.col(mode);
        if (static_cast<long long>(out.waits.size()) >= target_events) {
            break;
        }
    }
    return out;
}

}  // namespace qcoarse
