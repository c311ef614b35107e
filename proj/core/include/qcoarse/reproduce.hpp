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

#ifndef QCOARSE_REPRODUCE_HPP
#define QCOARSE_REPRODUCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qcoarse {

inline constexpr const char *kFigureIds[] = {"fig2", "fig3", "fig4b", "fig6", "fig7"};

struct ReproduceConfig {
    std::string figure;
    std::string out_dir = ".";
    /// "desk" or "paper" classical fitting scale
    std::string preset = "desk";
    std::uint64_t seed = 1;
    int samples = 1000;
    double eps_min = 1e-12;
    double eps_max = 1e-1;
    int eps_count = 45;
    /// fig4b: per-edge term budget and grid side
    int terms = 8;
    int grid = 11;
    /// fig6/fig7: samples and window index of the top-hat edge
    int tophat_samples = 6000;
    int tophat_edge_index = 512;
    int tophat_widths = 4;
    /// points in exported curves
    int curve_points = 1000;

    /// Canonical key=value text; hashed into every output header.
    std::string canonical() const;
};

/// Writes the CSV bundle for one figure and returns the paths written.
std::vector<std::string> reproduce(const ReproduceConfig &config);

}  // namespace qcoarse

#endif  // QCOARSE_REPRODUCE_HPP
