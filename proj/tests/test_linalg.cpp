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

#include <algorithm>
#include <cmath>
#include <random>

#include "qcoarse/errors.hpp"
#include "qcoarse/linalg.hpp"

namespace {

using qcoarse::cplx;

Eigen::MatrixXcd random_psd(int n, int rank, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(rank, n);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return a.adjoint() * a;
}

TEST(HankelEigen, MatchesDenseSolve) {
    std::vector<double> h;
    for (int j = 0; j <= 20; ++j) h.push_back(std::exp(-0.1 * j) + 0.3 * std::exp(-0.7 * j));
    const auto e = qcoarse::hankel_eigen(h);
    ASSERT_EQ(e.size, 11);
    ASSERT_EQ(e.block(), 11);
    Eigen::MatrixXd H(11, 11);
    for (int j = 0; j < 11; ++j)
        for (int k = 0; k < 11; ++k) H(j, k) = h[j + k];
    for (Eigen::Index i = 0; i < e.block(); ++i) {
        const Eigen::VectorXd v = e.full_vector(i);
        EXPECT_LE((H * v - e.values(i) * v).norm(), 1e-12);
    }
}

TEST(HankelEigen, TrailingZerosShrinkTheBlock) {
    std::vector<double> h(21, 0.0);
    for (int j = 0; j <= 4; ++j) h[j] = 1.0;
    const auto e = qcoarse::hankel_eigen(h);
    EXPECT_EQ(e.size, 11);
    EXPECT_EQ(e.block(), 5);
}

TEST(HankelEigen, RejectsBadInput) {
    EXPECT_THROW(qcoarse::hankel_eigen(std::vector<double>{1.0, 2.0}), qcoarse::DomainError);
    EXPECT_THROW(qcoarse::hankel_eigen(std::vector<double>{1.0, NAN, 1.0}), qcoarse::InputError);
    EXPECT_THROW(qcoarse::hankel_eigen(std::vector<double>{0.0, 0.0, 0.0}), qcoarse::NumericalFailure);
}

TEST(PolynomialRoots, KnownRoots) {
    // (z - 1)(z - 2)(z + 3) = z^3 - 7z + 6
    Eigen::VectorXd c(4);
    c << 6.0, -7.0, 0.0, 1.0;
    Eigen::VectorXcd r = qcoarse::polynomial_roots(c);
    std::vector<double> re;
    for (auto z : r) {
        EXPECT_NEAR(z.imag(), 0.0, 1e-12);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -3.0, 1e-12);
    EXPECT_NEAR(re[1], 1.0, 1e-12);
    EXPECT_NEAR(re[2], 2.0, 1e-12);
}

TEST(PolynomialRoots, ZeroConstantGivesRootAtOrigin) {
    Eigen::VectorXd c(3);
    c << 0.0, -2.0, 1.0;  // z (z - 2)
    const Eigen::VectorXcd r = qcoarse::polynomial_roots(c);
    ASSERT_EQ(r.size(), 2);
    EXPECT_EQ(r(0), cplx(0.0));
    EXPECT_NEAR(std::abs(r(1) - 2.0), 0.0, 1e-14);
}

TEST(PolynomialRoots, ComplexPair) {
    Eigen::VectorXd c(3);
    c << 1.0, 0.0, 1.0;  // z^2 + 1
    const Eigen::VectorXcd r = qcoarse::polynomial_roots(c);
    for (auto z : r) EXPECT_NEAR(std::abs(z * z + 1.0), 0.0, 1e-14);
}

TEST(Vandermonde, ExactFit) {
    Eigen::VectorXcd roots(2);
    roots << std::exp(cplx(-0.01, 0.05)), std::exp(cplx(-0.01, -0.05));
    std::vector<double> h;
    for (int j = 0; j < 200; ++j) h.push_back(2.0 * (std::pow(roots(0), j) * cplx(0.5, 0.25)).real());
    const auto fit = qcoarse::vandermonde_least_squares(roots, h);
    EXPECT_LE(fit.residual, 1e-12);
    EXPECT_NEAR(std::abs(fit.weights(0) - cplx(0.5, 0.25)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(fit.weights(1) - cplx(0.5, -0.25)), 0.0, 1e-10);
    EXPECT_FALSE(fit.truncated);
}

TEST(Vandermonde, GrowingRootStaysFinite) {
    Eigen::VectorXcd roots(2);
    roots << cplx(1.05), cplx(0.9);
    std::vector<double> h;
    for (int j = 0; j < 1001; ++j) h.push_back(std::pow(0.9, j));
    const auto fit = qcoarse::vandermonde_least_squares(roots, h);
    EXPECT_TRUE(fit.weights.allFinite());
    EXPECT_NEAR(std::abs(fit.weights(1) - 1.0), 0.0, 1e-8);
}

TEST(HermitianFactor, Identity) {
    const Eigen::MatrixXcd v = qcoarse::hermitian_factor(Eigen::MatrixXcd::Identity(3, 3), 1e-10);
    ASSERT_EQ(v.rows(), 3);
    EXPECT_LE((v.adjoint() * v - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(HermitianFactor, AllOnesIsRankOne) {
    const Eigen::MatrixXcd v = qcoarse::hermitian_factor(Eigen::MatrixXcd::Ones(3, 3), 1e-10);
    ASSERT_EQ(v.rows(), 1);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(v(0, j)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(v(0, 0) - v(0, 2)), 0.0, 1e-14);
}

TEST(HermitianFactor, RandomReconstruction) {
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + trial, rank = 1 + trial % n;
        const Eigen::MatrixXcd g = random_psd(n, rank, 100 + trial);
        const Eigen::MatrixXcd v = qcoarse::hermitian_factor(g, 1e-10);
        EXPECT_EQ(v.rows(), rank);
        EXPECT_LE((v.adjoint() * v - g).cwiseAbs().maxCoeff(), 1e-10 * g.trace().real());
    }
}

TEST(CompleteUnitary, FillsOpenColumns) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u.col(1) = Eigen::VectorXcd::Constant(4, cplx(0.5, 0.0));
    u(0, 3) = cplx(0.0, 1.0 / std::sqrt(2.0));
    u(1, 3) = cplx(0.0, -1.0 / std::sqrt(2.0));
    const Eigen::MatrixXcd before = u;
    qcoarse::complete_unitary(u, {false, true, false, true});
    EXPECT_LE(qcoarse::unitarity_defect(u), 1e-14);
    EXPECT_EQ(u.col(1), before.col(1));
    EXPECT_EQ(u.col(3), before.col(3));
}

}  // namespace
