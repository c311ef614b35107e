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

#ifndef QCOARSE_PROCESSES_HPP
#define QCOARSE_PROCESSES_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qcoarse {

/// phi(t) = rate * exp(-rate t)
struct Exponential {
    double rate;
};

/// phi(t) = rate^2 t exp(-rate t); two chained Poisson clocks.
struct AlternatingPoisson {
    double rate;
};

/// Sum of two Gaussian bumps restricted to t >= 0. The stored weights are
/// the normalized peak amplitudes, so phi(mean1) ~ weight1 when the peaks are
/// well separated.
struct BimodalGaussian {
    double weight1, weight2;
    double mean1, mean2;
    double width1, width2;
};

/// Uniform density 1/width on [edge - width, edge].
struct TopHat {
    double edge;
    double width;
};

/// Piecewise-linear density through (times[i], densities[i]), zero outside.
struct Tabulated {
    std::vector<double> times;
    std::vector<double> densities;
    /// survival at each node, precomputed on construction
    std::vector<double> survival_at_node;
    /// file the table was read from, if any
    std::string origin;
};

/// A continuous wait-time law phi(t) on t >= 0, normalized to unit mass.
///
/// All evaluation functions below work in the distribution's own time
/// coordinate. `time_unit` converts that coordinate to physical time and is
/// consulted only when reading or writing user-facing data; it never changes
/// the numbers produced by the decomposition pipeline.
class WaitTimeDistribution {
public:
    using Kind = std::variant<Exponential, AlternatingPoisson, BimodalGaussian, TopHat, Tabulated>;

    static WaitTimeDistribution exponential(double rate);
    static WaitTimeDistribution alternating_poisson(double rate);
    /// Weights are relative; they are rescaled so the density integrates to one.
    static WaitTimeDistribution bimodal_gaussian(
        double weight1, double weight2, double mean1, double mean2, double width1, double width2);
    /// Equal weights, unit widths, means sqrt(5) and sqrt(33.8).
    static WaitTimeDistribution bimodal_gaussian_default();
    static WaitTimeDistribution top_hat(double edge, double width);
    /// Densities are renormalized by their trapezoid integral.
    static WaitTimeDistribution tabulated(std::vector<double> times, std::vector<double> densities);

    const Kind &kind() const noexcept {
        return kind_;
    }
    double time_unit() const noexcept {
        return time_unit_;
    }
    WaitTimeDistribution with_time_unit(double unit) const;
    /// Records the source file of a tabulated law; no effect on other kinds.
    WaitTimeDistribution with_origin(std::string path) const;

    /// Canonical spec string, e.g. "alternating_poisson:rate=1".
    std::string describe() const;

private:
    explicit WaitTimeDistribution(Kind kind) : kind_(std::move(kind)) {
    }
    Kind kind_;
    double time_unit_ = 1.0;
};

/// Tail cutoff threshold used for default approximation windows.
inline constexpr double kTailSurvival = 1e-6;
/// Approximation window = padding * tail cutoff.
inline constexpr double kDomainPadding = 1.25;
/// Sample count used by the decomposition pipeline unless overridden.
inline constexpr int kDefaultSamples = 1000;

double pdf(const WaitTimeDistribution &dist, double t);
double survival(const WaitTimeDistribution &dist, double t);
/// Cumulative distribution, 1 - survival.
double cdf(const WaitTimeDistribution &dist, double t);
double mean_wait(const WaitTimeDistribution &dist);
double mean_firing_rate(const WaitTimeDistribution &dist);
/// pi(t) = mu * Phi(t): occupation density of "time since last event".
double steady_state_density(const WaitTimeDistribution &dist, double t);
double sqrt_wave(const WaitTimeDistribution &dist, double t);

/// Closed support [lo, hi]; hi is +inf for unbounded laws.
std::pair<double, double> support(const WaitTimeDistribution &dist);

/// Smallest t with survival(t) <= threshold, found by bisection.
double tail_cutoff(const WaitTimeDistribution &dist, double threshold = kTailSurvival);

/// Default approximation window T, mapped onto the unit domain [0, 1].
double default_domain(const WaitTimeDistribution &dist);

/// h_j = psi_u(j / M) for 0 <= j <= M, where psi_u(s) = sqrt(T phi(T s)) is
/// the square-root density after rescaling [0, T] to [0, 1].
std::vector<double> sample_grid(const WaitTimeDistribution &dist, int samples, double domain);

/// Parses "name:key=value,key=value". Recognized names: exponential,
/// alternating_poisson, bimodal_gaussian, top_hat, tabulated (key file=path).
/// A time_unit=<value> key applies to any kind.
WaitTimeDistribution parse_distribution(const std::string &spec);

}  // namespace qcoarse

#endif  // QCOARSE_PROCESSES_HPP
