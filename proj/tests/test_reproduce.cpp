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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcoarse/errors.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/processes.hpp"
#include "qcoarse/reproduce.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const std::string &path) {
    std::ifstream in(path);
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.comments.push_back(line);
        } else if (csv.header.empty()) {
            csv.header = split(line, ',');
        } else {
            csv.rows.push_back(split(line, ','));
        }
    }
    return csv;
}

qcoarse::ReproduceConfig small_fig4b() {
    qcoarse::ReproduceConfig c;
    c.figure = "fig4b";
    c.out_dir = (fs::temp_directory_path() / "qcoarse_reproduce").string();
    c.samples = 300;
    c.terms = 4;
    c.grid = 2;
    c.eps_count = 12;
    return c;
}

TEST(Reproduce, RejectsUnknownFigureAndPreset) {
    auto c = small_fig4b();
    c.figure = "fig9";
    EXPECT_THROW(qcoarse::reproduce(c), qcoarse::InputError);
    c = small_fig4b();
    c.preset = "huge";
    EXPECT_THROW(qcoarse::reproduce(c), qcoarse::InputError);
}

TEST(Reproduce, CanonicalConfigChangesWithEveryField) {
    const auto base = small_fig4b();
    auto other = base;
    other.seed = 2;
    EXPECT_NE(base.canonical(), other.canonical());
    other = base;
    other.eps_min = 1e-11;
    EXPECT_NE(base.canonical(), other.canonical());
    other = base;
    other.out_dir = "/elsewhere";
    EXPECT_EQ(base.canonical(), other.canonical());
}

TEST(Reproduce, HeatMapSchemaAndCornerIdentity) {
    const auto c = small_fig4b();
    const auto files = qcoarse::reproduce(c);
    ASSERT_EQ(files.size(), 1u);
    const Csv csv = read_csv(files[0]);
    ASSERT_GE(csv.comments.size(), 3u);
    EXPECT_EQ(csv.comments[1], "# config_hash=" + qcoarse::hex64(qcoarse::fnv1a(c.canonical())));
    EXPECT_EQ(csv.header, (std::vector<std::string>{"p", "q", "averaged_ks", "memory_dimension", "generators"}));
    ASSERT_EQ(csv.rows.size(), 4u);

    qcoarse::ScanOptions opt;
    opt.samples = c.samples;
    const auto eps = qcoarse::log_grid(c.eps_min, c.eps_max, c.eps_count);
    const double ap =
        qcoarse::scan_epsilon(qcoarse::WaitTimeDistribution::alternating_poisson(1.0), c.terms, eps, opt)
            .best_ks.statistic;
    const double bg =
        qcoarse::scan_epsilon(qcoarse::WaitTimeDistribution::bimodal_gaussian_default(), c.terms, eps, opt)
            .best_ks.statistic;
    for (const auto &row : csv.rows) {
        ASSERT_EQ(row.size(), 5u);
        const double p = qcoarse::parse_double(row[0]);
        const double q = qcoarse::parse_double(row[1]);
        const double ks = qcoarse::parse_double(row[2]);
        EXPECT_LE(std::stoi(row[3]), 2 * 2 * c.terms);
        if (p == 0.0 && q == 0.0) EXPECT_NEAR(ks, ap, 1e-9);
        if (p == 1.0 && q == 1.0) EXPECT_NEAR(ks, bg, 1e-9);
        EXPECT_GE(ks, std::min(ap, bg) - 1e-9);
        EXPECT_LE(ks, std::max(ap, bg) + 1e-9);
    }
}

TEST(Reproduce, TopHatCurvesHaveOneFilePerWidth) {
    qcoarse::ReproduceConfig c;
    c.figure = "fig7";
    c.out_dir = (fs::temp_directory_path() / "qcoarse_reproduce").string();
    c.tophat_samples = 600;
    c.tophat_edge_index = 64;
    c.tophat_widths = 2;
    c.eps_count = 8;
    c.curve_points = 50;
    const auto files = qcoarse::reproduce(c);
    ASSERT_EQ(files.size(), 2u);
    for (const auto &path : files) {
        const Csv csv = read_csv(path);
        EXPECT_FALSE(csv.header.empty());
        EXPECT_EQ(csv.header.front(), "t");
        EXPECT_GE(csv.rows.size(), 50u);
        for (const auto &row : csv.rows) EXPECT_EQ(row.size(), csv.header.size());
    }
}

}  // namespace
