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

#include "qcoarse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qcoarse/errors.hpp"

namespace qcoarse {

std::string KsReport::csv_row() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", statistic, argmax);
    return buf;
}

KsReport KsReport::from_csv_row(const std::string &row) {
    const auto comma = row.find(',');
    if (comma == std::string::npos) {
        throw InputError("KS row must have two comma-separated fields");
    }
    KsReport r;
    r.statistic = std::stod(row.substr(0, comma));
    r.argmax = std::stod(row.substr(comma + 1));
    return r;
}

std::vector<double> survival_grid(const CurveFn &a, const CurveFn &b, double span, int intervals, double tail,
                                  double max_span) {
    if (!(span > 0.0) || intervals < 1) {
        throw DomainError("survival grid needs positive span and at least one interval");
    }
    const double dt = span / intervals;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) {
        grid.push_back(dt * i);
    }
    const auto cap = static_cast<long>(std::ceil(max_span / dt));
    for (long i = intervals + 1; i <= cap; ++i) {
        const double t = grid.back();
        if (a(t) < tail && b(t) < tail) {
            break;
        }
        grid.push_back(dt * static_cast<double>(i));
    }
    return grid;
}

KsReport ks_survival(std::span<const double> a, std::span<const double> b, std::span<const double> grid) {
    if (a.size() != b.size() || a.size() != grid.size()) {
        throw InputError("survival curves and grid must have equal length");
    }
    KsReport r;
    r.resolution = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > r.statistic) {
            r.statistic = d;
            r.argmax = grid[i];
        }
    }
    return r;
}

KsReport ks_survival(const CurveFn &a, const CurveFn &b, double span, int intervals) {
    const auto grid = survival_grid(a, b, span, intervals);
    std::vector<double> va(grid.size()), vb(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        va[i] = a(grid[i]);
        vb[i] = b(grid[i]);
    }
    return ks_survival(va, vb, grid);
}

KsReport ks_continuous_discrete(const CurveFn &cdf_p, const DiscretePmf &q, std::span<const double> grid) {
    KsReport r;
    auto consider = [&r](double d, double t) {
        d = std::abs(d);
        if (d > r.statistic) {
            r.statistic = d;
            r.argmax = t;
        }
    };
    double cq = 0.0;
    for (std::size_t k = 0; k < q.mass.size(); ++k) {
        const double t = q.step * static_cast<double>(k + 1);
        const double cp = cdf_p(t);
        consider(cp - cq, t);
        cq += q.mass[k];
        consider(cp - cq, t);
    }
    r.resolution = q.mass.size();
    if (!grid.empty()) {
        // running prefix sums of q at each grid point
        std::vector<double> prefix(q.mass.size() + 1, 0.0);
        for (std::size_t k = 0; k < q.mass.size(); ++k) {
            prefix[k + 1] = prefix[k] + q.mass[k];
        }
        for (double t : grid) {
            auto atoms = static_cast<std::size_t>(std::floor(t / q.step + 1e-12));
            atoms = std::min(atoms, q.mass.size());
            consider(cdf_p(t) - prefix[atoms], t);
        }
        r.resolution += grid.size();
    }
    // t -> infinity: C_p -> 1, C_q -> 1 - residual
    consider(1.0 - cq, std::numeric_limits<double>::infinity());
    return r;
}

double averaged_ks(std::span<const double> weights, std::span<const double> ks) {
    if (weights.size() != ks.size()) {
        throw InputError("averaged KS needs one weight per edge");
    }
    double total = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        acc += weights[i] * ks[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InputError("averaged KS weights sum to " + std::to_string(total) + ", expected 1");
    }
    return acc;
}

}  // namespace qcoarse
