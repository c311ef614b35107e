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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "qcoarse/classical.hpp"
#include "qcoarse/errors.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/qmodel.hpp"

namespace {

using qcoarse::cplx;
using qcoarse::ExpSum;

namespace fs = std::filesystem;

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / ("qcoarse_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(dir);
    return dir;
}

ExpSum sample_sum() {
    ExpSum s;
    s.terms.push_back({cplx(1.25, -0.5), 3.0, 7.5});
    s.terms.push_back({cplx(-0.1, 1.0 / 3.0), 0.7, -2.0});
    s.domain_scale = 400.0;
    s.time_scale = 5.123456789;
    return s;
}

TEST(FormatDouble, RoundTripsRandomValues) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(qcoarse::parse_double(qcoarse::format_double(v)), v);
    }
    EXPECT_EQ(qcoarse::format_double(0.5), "0.5");
    EXPECT_TRUE(std::isinf(qcoarse::parse_double(qcoarse::format_double(std::numeric_limits<double>::infinity()))));
    EXPECT_THROW(qcoarse::parse_double("1.0abc"), qcoarse::InputError);
}

TEST(Hash, FnvKnownValues) {
    EXPECT_EQ(qcoarse::fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(qcoarse::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(qcoarse::hex64(0xabcULL), "0000000000000abc");
}

TEST(ExpSumIo, StreamRoundTripIsExact) {
    const ExpSum s = sample_sum();
    std::stringstream ss;
    qcoarse::write_expsum(ss, s);
    const ExpSum back = qcoarse::read_expsum(ss);
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.domain_scale, s.domain_scale);
    EXPECT_EQ(back.time_scale, s.time_scale);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(back.terms[i].weight, s.terms[i].weight);
        EXPECT_EQ(back.terms[i].decay, s.terms[i].decay);
        EXPECT_EQ(back.terms[i].frequency, s.terms[i].frequency);
    }
}

TEST(ExpSumIo, FileRoundTrip) {
    const auto path = (temp_dir() / "sum.txt").string();
    qcoarse::save_expsum(path, sample_sum());
    const ExpSum back = qcoarse::load_expsum(path);
    EXPECT_EQ(back.terms[1].weight, sample_sum().terms[1].weight);
}

TEST(ExpSumIo, MalformedInputIsRejected) {
    std::istringstream empty("");
    EXPECT_THROW(qcoarse::read_expsum(empty), qcoarse::InputError);
    std::istringstream short_rows("2 1 1\n1 0 1 0\n");
    EXPECT_THROW(qcoarse::read_expsum(short_rows), qcoarse::InputError);
    EXPECT_THROW(qcoarse::load_expsum("/nonexistent/qcoarse.txt"), qcoarse::InputError);
}

TEST(ModelIo, RoundTripIsBitExact) {
    ExpSum s;
    s.terms.push_back({cplx(1.0, 0.2), 2.0, 0.0});
    s.terms.push_back({cplx(0.5, -0.3), 5.0, 9.0});
    const auto model = qcoarse::build_unitary(s, 1e-3);
    std::stringstream ss;
    qcoarse::write_model(ss, model);
    const std::string first = ss.str();
    const auto back = qcoarse::read_model(ss);
    EXPECT_EQ(back.dimension, model.dimension);
    EXPECT_EQ(back.dt, model.dt);
    EXPECT_EQ(back.eta, model.eta);
    EXPECT_TRUE(back.unitary == model.unitary);
    EXPECT_TRUE(back.reset == model.reset);
    EXPECT_TRUE(back.generators == model.generators);
    std::ostringstream again;
    qcoarse::write_model(again, back);
    EXPECT_EQ(again.str(), first);
    EXPECT_EQ(qcoarse::model_hash(back), qcoarse::model_hash(model));
}

TEST(WaitsIo, RoundTripWithHeader) {
    const std::vector<long long> waits{1, 5, 42, 1000000000000LL};
    std::stringstream ss;
    qcoarse::write_waits(ss, waits, 99, 1e-3, 0x1234);
    const std::string text = ss.str();
    EXPECT_NE(text.find("# seed=99"), std::string::npos);
    EXPECT_EQ(qcoarse::read_waits(ss), waits);
    std::istringstream bad("# seed=1\n3\nfour\n");
    EXPECT_THROW(qcoarse::read_waits(bad), qcoarse::InputError);
}

TEST(FitReportIo, RowsRoundTrip) {
    qcoarse::ClassicalFit fit;
    for (int r = 0; r < 3; ++r) {
        qcoarse::FitRun run;
        run.loop = r;
        run.seed = 10 + r;
        run.ks = 0.1 * (r + 1) / 3.0;
        run.model.p = {0.125, 1.0 / 7.0, 0.5};
        run.model.dt = 0.0123 + r;
        run.model.loop = r;
        fit.runs.push_back(run);
    }
    std::stringstream ss;
    qcoarse::write_fit_report(ss, fit);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "R,seed,final_KS,dt,p_0,p_1,p_2");
    const auto back = qcoarse::read_fit_report(ss);
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].loop, fit.runs[i].loop);
        EXPECT_EQ(back[i].seed, fit.runs[i].seed);
        EXPECT_EQ(back[i].ks, fit.runs[i].ks);
        EXPECT_EQ(back[i].model.dt, fit.runs[i].model.dt);
        EXPECT_EQ(back[i].model.p, fit.runs[i].model.p);
    }
}

TEST(ScanReportIo, HeaderAndRows) {
    qcoarse::ScanOptions o;
    o.samples = 200;
    const auto scan = qcoarse::scan_epsilon(qcoarse::WaitTimeDistribution::exponential(2.0), 2,
                                            qcoarse::default_eps_grid(), o);
    std::ostringstream ss;
    qcoarse::write_scan_report(ss, scan);
    std::istringstream in(ss.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "eps,eigen_index,eigenvalue,ks,terms,truncated_weight,residual,status");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    EXPECT_EQ(rows, static_cast<int>(scan.report.size() + scan.failures.size()));
}

TEST(TabulatedIo, LoadsTwoColumns) {
    const auto path = (temp_dir() / "tab.txt").string();
    {
        std::ofstream out(path);
        out << "# uniform on [0, 2]\n0 0.5\n1 0.5\n2 0.5\n";
    }
    const auto d = qcoarse::load_tabulated(path);
    EXPECT_NEAR(qcoarse::survival(d, 1.0), 0.5, 1e-9);
    {
        std::ofstream out(path);
        out << "0 0.5 1\n";
    }
    EXPECT_THROW(qcoarse::load_tabulated(path), qcoarse::InputError);
}

TEST(HsmmIo, MalformedRowIsRejected) {
    std::istringstream in("modes A\nevents x\nA x B 1.0 exponential:rate=1\n");
    EXPECT_THROW(qcoarse::read_hsmm(in), qcoarse::InputError);
}

}  // namespace
