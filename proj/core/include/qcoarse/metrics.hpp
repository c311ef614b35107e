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

#ifndef QCOARSE_METRICS_HPP
#define QCOARSE_METRICS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qcoarse {

/// Distribution over wait times (k + 1) * step, k = 0, 1, ...
///
/// `residual` is the probability mass not represented in `mass` (truncation
/// at a step budget, or a counter that can loop without firing).
struct DiscretePmf {
    double step = 1.0;
    std::vector<double> mass;
    double residual = 0.0;
};

struct KsReport {
    double statistic = 0.0;
    double argmax = 0.0;
    std::size_t resolution = 0;

    /// "statistic,argmax_t" with round-trip precision.
    std::string csv_row() const;
    static KsReport from_csv_row(const std::string &row);
};

using CurveFn = std::function<double(double)>;

/// Uniform grid with spacing span/intervals starting at 0 and covering at
/// least [0, span]; it keeps extending while either survival curve is still
/// at or above `tail` (capped at `max_span`).
std::vector<double> survival_grid(const CurveFn &a, const CurveFn &b, double span = 1.0,
                                  int intervals = 1000, double tail = 1e-6, double max_span = 100.0);

/// max_i |a_i - b_i| over pre-evaluated curves.
KsReport ks_survival(std::span<const double> a, std::span<const double> b, std::span<const double> grid);

/// Evaluates both survival curves on `survival_grid(a, b, span, intervals)`.
KsReport ks_survival(const CurveFn &a, const CurveFn &b, double span = 1.0, int intervals = 1000);

/// KS between a continuous CDF and the step CDF of a discrete law.
///
/// The supremum of |C_p - C_q| with C_p continuous and non-decreasing is
/// attained at a jump of C_q (from either side) or in the limit t -> inf, so
/// it is evaluated exactly at every atom. `grid` adds extra probe points.
KsReport ks_continuous_discrete(const CurveFn &cdf_p, const DiscretePmf &q, std::span<const double> grid = {});

/// Sum_e ks[e] * weight[e]; weights must sum to one within 1e-9.
double averaged_ks(std::span<const double> weights, std::span<const double> ks);

}  // namespace qcoarse

#endif  // QCOARSE_METRICS_HPP
