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

#include "qcoarse/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "qcoarse/errors.hpp"
#include "qcoarse/io.hpp"

namespace qcoarse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_time(double t) {
    if (!(t >= 0.0)) {
        throw DomainError("wait time must be non-negative, got " + std::to_string(t));
    }
}

void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InputError(std::string(what) + " must be positive and finite");
    }
}

// Mass of exp(-(t-m)^2/w^2) on [0, inf).
double half_line_gaussian_mass(double mean, double width) {
    return 0.5 * std::sqrt(std::numbers::pi) * width * (1.0 + std::erf(mean / width));
}

// Mass of exp(-(t-m)^2/w^2) on [t, inf).
double gaussian_tail(double t, double mean, double width) {
    return 0.5 * std::sqrt(std::numbers::pi) * width * std::erfc((t - mean) / width);
}

// First moment of exp(-(t-m)^2/w^2) on [0, inf).
double half_line_gaussian_moment(double mean, double width) {
    return mean * half_line_gaussian_mass(mean, width) +
           0.5 * width * width * std::exp(-(mean * mean) / (width * width));
}

double tabulated_pdf(const Tabulated &tab, double t) {
    const auto &x = tab.times;
    if (t < x.front() || t > x.back()) {
        return 0.0;
    }
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) {
        return tab.densities.back();
    }
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double a = x[i - 1], b = x[i];
    const double u = (t - a) / (b - a);
    return tab.densities[i - 1] * (1.0 - u) + tab.densities[i] * u;
}

double tabulated_survival(const Tabulated &tab, double t) {
    const auto &x = tab.times;
    if (t <= x.front()) {
        return 1.0;
    }
    if (t >= x.back()) {
        return 0.0;
    }
    auto it = std::upper_bound(x.begin(), x.end(), t);
    const auto i = static_cast<std::size_t>(it - x.begin());
    // integral over [t, x[i]] of the linear piece, plus the stored tail from x[i]
    const double ft = tabulated_pdf(tab, t);
    return tab.survival_at_node[i] + 0.5 * (ft + tab.densities[i]) * (x[i] - t);
}

double tabulated_mean(const Tabulated &tab) {
    double m = 0.0;
    for (std::size_t i = 1; i < tab.times.size(); ++i) {
        const double a = tab.times[i - 1], b = tab.times[i];
        const double fa = tab.densities[i - 1], fb = tab.densities[i];
        m += (b - a) / 6.0 * (fa * (2.0 * a + b) + fb * (a + 2.0 * b));
    }
    return m;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

WaitTimeDistribution WaitTimeDistribution::exponential(double rate) {
    require_positive(rate, "exponential rate");
    return WaitTimeDistribution(Exponential{rate});
}

WaitTimeDistribution WaitTimeDistribution::alternating_poisson(double rate) {
    require_positive(rate, "alternating_poisson rate");
    return WaitTimeDistribution(AlternatingPoisson{rate});
}

WaitTimeDistribution WaitTimeDistribution::bimodal_gaussian(
    double weight1, double weight2, double mean1, double mean2, double width1, double width2) {
    require_positive(weight1, "bimodal weight p1");
    require_positive(weight2, "bimodal weight p2");
    require_positive(mean1, "bimodal mean mu1");
    require_positive(mean2, "bimodal mean mu2");
    require_positive(width1, "bimodal width sigma1");
    require_positive(width2, "bimodal width sigma2");
    const double mass =
        weight1 * half_line_gaussian_mass(mean1, width1) + weight2 * half_line_gaussian_mass(mean2, width2);
    return WaitTimeDistribution(
        BimodalGaussian{weight1 / mass, weight2 / mass, mean1, mean2, width1, width2});
}

WaitTimeDistribution WaitTimeDistribution::bimodal_gaussian_default() {
    return bimodal_gaussian(1.0, 1.0, std::sqrt(5.0), std::sqrt(33.8), 1.0, 1.0);
}

WaitTimeDistribution WaitTimeDistribution::top_hat(double edge, double width) {
    require_positive(edge, "top_hat edge tau");
    require_positive(width, "top_hat width");
    if (width > edge) {
        throw InputError("top_hat width must not exceed its right edge");
    }
    return WaitTimeDistribution(TopHat{edge, width});
}

WaitTimeDistribution WaitTimeDistribution::tabulated(std::vector<double> times, std::vector<double> densities) {
    if (times.size() != densities.size() || times.size() < 2) {
        throw InputError("tabulated distribution needs at least two (t, density) rows");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(densities[i])) {
            throw InputError("tabulated distribution contains non-finite values");
        }
        if (times[i] < 0.0) {
            throw InputError("tabulated times must be non-negative");
        }
        if (densities[i] < 0.0) {
            throw InputError("tabulated densities must be non-negative");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw InputError("tabulated grid must be strictly ascending");
        }
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        mass += 0.5 * (densities[i] + densities[i - 1]) * (times[i] - times[i - 1]);
    }
    if (!(mass > 0.0)) {
        throw InputError("tabulated density has zero mass");
    }
    for (auto &d : densities) {
        d /= mass;
    }
    std::vector<double> tail(times.size(), 0.0);
    for (std::size_t i = times.size() - 1; i-- > 0;) {
        tail[i] = tail[i + 1] + 0.5 * (densities[i] + densities[i + 1]) * (times[i + 1] - times[i]);
    }
    return WaitTimeDistribution(Tabulated{std::move(times), std::move(densities), std::move(tail), {}});
}

WaitTimeDistribution WaitTimeDistribution::with_time_unit(double unit) const {
    require_positive(unit, "time_unit");
    WaitTimeDistribution out = *this;
    out.time_unit_ = unit;
    return out;
}

WaitTimeDistribution WaitTimeDistribution::with_origin(std::string path) const {
    WaitTimeDistribution out = *this;
    if (auto *tab = std::get_if<Tabulated>(&out.kind_)) {
        tab->origin = std::move(path);
    }
    return out;
}

std::string WaitTimeDistribution::describe() const {
    std::string body = std::visit(
        overloaded{
            [](const Exponential &e) { return "exponential:rate=" + fmt_double(e.rate); },
            [](const AlternatingPoisson &e) { return "alternating_poisson:rate=" + fmt_double(e.rate); },
            [](const BimodalGaussian &b) {
                return "bimodal_gaussian:p1=" + fmt_double(b.weight1) + ",p2=" + fmt_double(b.weight2) +
                       ",mu1=" + fmt_double(b.mean1) + ",mu2=" + fmt_double(b.mean2) +
                       ",sigma1=" + fmt_double(b.width1) + ",sigma2=" + fmt_double(b.width2);
            },
            [](const TopHat &h) { return "top_hat:tau=" + fmt_double(h.edge) + ",width=" + fmt_double(h.width); },
            [](const Tabulated &t) {
                return t.origin.empty() ? "tabulated:points=" + std::to_string(t.times.size())
                                        : "tabulated:file=" + t.origin;
            },
        },
        kind_);
    if (time_unit_ != 1.0) {
        body += ",time_unit=" + fmt_double(time_unit_);
    }
    return body;
}

double pdf(const WaitTimeDistribution &dist, double t) {
    require_time(t);
    return std::visit(
        overloaded{
            [t](const Exponential &e) { return e.rate * std::exp(-e.rate * t); },
            [t](const AlternatingPoisson &e) { return e.rate * e.rate * t * std::exp(-e.rate * t); },
            [t](const BimodalGaussian &b) {
                const double u1 = (t - b.mean1) / b.width1, u2 = (t - b.mean2) / b.width2;
                return b.weight1 * std::exp(-u1 * u1) + b.weight2 * std::exp(-u2 * u2);
            },
            [t](const TopHat &h) {
                return (t >= h.edge - h.width && t <= h.edge) ? 1.0 / h.width : 0.0;
            },
            [t](const Tabulated &tab) { return tabulated_pdf(tab, t); },
        },
        dist.kind());
}

double survival(const WaitTimeDistribution &dist, double t) {
    require_time(t);
    if (t == 0.0) {
        return 1.0;
    }
    return std::visit(
        overloaded{
            [t](const Exponential &e) { return std::exp(-e.rate * t); },
            [t](const AlternatingPoisson &e) { return (1.0 + e.rate * t) * std::exp(-e.rate * t); },
            [t](const BimodalGaussian &b) {
                const double s = b.weight1 * gaussian_tail(t, b.mean1, b.width1) +
                                 b.weight2 * gaussian_tail(t, b.mean2, b.width2);
                return std::min(1.0, s);
            },
            [t](const TopHat &h) {
                const double lo = h.edge - h.width;
                if (t <= lo) return 1.0;
                if (t >= h.edge) return 0.0;
                return (h.edge - t) / h.width;
            },
            [t](const Tabulated &tab) { return tabulated_survival(tab, t); },
        },
        dist.kind());
}

double cdf(const WaitTimeDistribution &dist, double t) {
    return 1.0 - survival(dist, t);
}

double mean_wait(const WaitTimeDistribution &dist) {
    const double m = std::visit(
        overloaded{
            [](const Exponential &e) { return 1.0 / e.rate; },
            [](const AlternatingPoisson &e) { return 2.0 / e.rate; },
            [](const BimodalGaussian &b) {
                return b.weight1 * half_line_gaussian_moment(b.mean1, b.width1) +
                       b.weight2 * half_line_gaussian_moment(b.mean2, b.width2);
            },
            [](const TopHat &h) { return h.edge - 0.5 * h.width; },
            [](const Tabulated &tab) { return tabulated_mean(tab); },
        },
        dist.kind());
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw UnsupportedDistribution("distribution has no finite positive mean wait");
    }
    return m;
}

double mean_firing_rate(const WaitTimeDistribution &dist) {
    return 1.0 / mean_wait(dist);
}

double steady_state_density(const WaitTimeDistribution &dist, double t) {
    return mean_firing_rate(dist) * survival(dist, t);
}

double sqrt_wave(const WaitTimeDistribution &dist, double t) {
    return std::sqrt(pdf(dist, t));
}

std::pair<double, double> support(const WaitTimeDistribution &dist) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        overloaded{
            [](const Exponential &) { return std::pair{0.0, inf}; },
            [](const AlternatingPoisson &) { return std::pair{0.0, inf}; },
            [](const BimodalGaussian &) { return std::pair{0.0, inf}; },
            [](const TopHat &h) { return std::pair{h.edge - h.width, h.edge}; },
            [](const Tabulated &tab) { return std::pair{tab.times.front(), tab.times.back()}; },
        },
        dist.kind());
}

double tail_cutoff(const WaitTimeDistribution &dist, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("tail threshold must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = mean_wait(dist);
    int guard = 0;
    while (survival(dist, hi) > threshold) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) {
            throw UnsupportedDistribution("survival never drops below tail threshold");
        }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (survival(dist, mid) > threshold) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double default_domain(const WaitTimeDistribution &dist) {
    return kDomainPadding * tail_cutoff(dist);
}

std::vector<double> sample_grid(const WaitTimeDistribution &dist, int samples, double domain) {
    if (samples < 2 || samples % 2 != 0) {
        throw DomainError("sample count must be even and at least 2");
    }
    if (!(domain > 0.0)) {
        throw DomainError("approximation domain must be positive");
    }
    std::vector<double> h(static_cast<std::size_t>(samples) + 1);
    for (int j = 0; j <= samples; ++j) {
        const double t = domain * static_cast<double>(j) / samples;
        h[static_cast<std::size_t>(j)] = std::sqrt(domain * pdf(dist, t));
    }
    return h;
}

WaitTimeDistribution parse_distribution(const std::string &spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::map<std::string, std::string> kv;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw InputError("malformed distribution parameter '" + item + "' in '" + spec + "'");
            }
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    auto take = [&](const std::string &key, std::optional<double> fallback = std::nullopt) -> double {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (fallback) return *fallback;
            throw InputError("distribution '" + name + "' requires parameter '" + key + "'");
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(it->second, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != it->second.size()) {
            throw InputError("parameter '" + key + "' is not a number: " + it->second);
        }
        kv.erase(it);
        return v;
    };
    double unit = take("time_unit", 1.0);

    std::optional<WaitTimeDistribution> out;
    if (name == "exponential") {
        out = WaitTimeDistribution::exponential(take("rate", 1.0));
    } else if (name == "alternating_poisson") {
        out = WaitTimeDistribution::alternating_poisson(take("rate", 1.0));
    } else if (name == "bimodal_gaussian") {
        const double p1 = take("p1", 1.0), p2 = take("p2", 1.0);
        const double mu1 = take("mu1", std::sqrt(5.0)), mu2 = take("mu2", std::sqrt(33.8));
        const double s1 = take("sigma1", 1.0), s2 = take("sigma2", 1.0);
        out = WaitTimeDistribution::bimodal_gaussian(p1, p2, mu1, mu2, s1, s2);
    } else if (name == "top_hat") {
        const double tau = take("tau", 1.0);
        out = WaitTimeDistribution::top_hat(tau, take("width", tau));
    } else if (name == "tabulated") {
        auto it = kv.find("file");
        if (it == kv.end()) {
            throw InputError("tabulated distribution requires file=<path>");
        }
        const std::string path = it->second;
        kv.erase(it);
        out = load_tabulated(path).with_origin(path);
    } else {
        throw InputError("unknown distribution '" + name + "'");
    }
    if (!kv.empty()) {
        throw InputError("unknown parameter '" + kv.begin()->first + "' for distribution '" + name + "'");
    }
    return out->with_time_unit(unit);
}

}  // namespace qcoarse
