// Copyright 2026 The lpmat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lpmat/distance.hpp"
#include "lpmat/matrix.hpp"
#include "lpmat/spectra.hpp"

namespace lpmat {
namespace {

DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(BuildX, Reshape) {
  const std::vector<double> rec{1, 2, 3, 4};
  EXPECT_EQ(build_X(rec, {2, 2}), from_rows({{1, 2}, {3, 4}}));
  EXPECT_THROW(build_X(rec, {2, 3}), ValidationError);
}

TEST(BuildX, WhiteNoiseIsReshapedInnovations) {
  ProcessSpec spec;
  spec.innovations.seed = 5;
  const MatrixShape shape{3, 4};
  const auto x = build_X(spec, shape);
  const auto z = build_Z(spec, shape);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(x(i, t), z(i + 1, t));
}

TEST(BuildX, MaLagOneCorrelationAcrossRowBoundary) {
  // Corr(X_{i,n}, X_{i+1,1}) = gamma(1) / gamma(0) = 0.4 for MA(1) theta = 0.5.
  ProcessSpec spec;
  spec.model = MovingAverage{{0.5}};
  const MatrixShape shape{2, 6};
  const int reps = 20000;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int r = 0; r < reps; ++r) {
    spec.innovations.seed = replicate_seed(77, static_cast<std::uint64_t>(r));
    const auto x = build_X(spec, shape);
    const double a = x(0, 5), b = x(1, 0);
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  const double rho = sxy / std::sqrt(sxx * syy);
  const double sigma = (1.0 - 0.16) / std::sqrt(static_cast<double>(reps));
  EXPECT_NEAR(rho, 0.4, 3.0 * sigma);
}

TEST(BuildTruncatedX, ExactBeyondModelOrder) {
  ProcessSpec spec;
  spec.innovations.seed = 8;
  spec.model = MovingAverage{{0.5}};
  EXPECT_EQ(build_truncated_X(spec, {4, 3}), build_X(spec, {4, 3}));
  spec.model = ExplicitList{{1.0}};
  EXPECT_EQ(build_truncated_X(spec, {4, 3}), build_X(spec, {4, 3}));
}

TEST(BuildTruncatedX, ArTailBound) {
  ProcessSpec spec;
  spec.innovations.seed = 2;
  spec.model = AutoRegressive1{0.5};
  spec.horizon = 200;
  const MatrixShape shape{64, 64};
  const auto x = build_X(spec, shape);
  const auto xt = build_truncated_X(spec, shape);
  const std::size_t horizon = resolve_horizon(spec, shape.n);
  double zmax = 0.0;
  for (std::int64_t t = 1 - static_cast<std::int64_t>(horizon); t <= 64 * 64; ++t)
    zmax = std::max(zmax, std::abs(spec.innovations.stream()(t)));
  double tail = 0.0;
  for (std::size_t j = shape.n + 1; j <= horizon; ++j) tail += std::pow(0.5, static_cast<double>(j));
  EXPECT_LE(max_abs_difference(x, xt), tail * zmax * (1 + 1e-12));
  EXPECT_GT(max_abs_difference(x, xt), 0.0);
}

TEST(BuildZ, IndexBookkeeping) {
  ProcessSpec spec;
  spec.innovations.seed = 4;
  const auto z = build_Z(spec, {1, 2});
  const auto s = spec.innovations.stream();
  EXPECT_EQ(z(0, 0), s(-1));
  EXPECT_EQ(z(0, 1), s(0));
  EXPECT_EQ(z(1, 0), s(1));
  EXPECT_EQ(z(1, 1), s(2));
}

TEST(BuildZ, RademacherEntriesAreSigns) {
  ProcessSpec spec;
  spec.innovations.distribution = InnovationDistribution::Rademacher;
  const auto z = build_Z(spec, {5, 7});
  for (double v : z.values()) EXPECT_EQ(std::abs(v), 1.0);
}

TEST(Omega, SmallExample) {
  const std::vector<double> c{10, 11, 12};
  EXPECT_EQ(build_Omega(c, 2), from_rows({{12, 10, 11}, {11, 12, 10}}));
}

TEST(Omega, GramGivesAutocovariances) {
  const std::vector<double> c{1.0, 0.5, 0.0};
  const auto o = build_Omega(c, 2);
  const auto g = o * o.transpose();
  EXPECT_DOUBLE_EQ(g(0, 0), 1.25);
  EXPECT_DOUBLE_EQ(g(1, 1), 1.25);
  EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
}

TEST(Omega, UnitCoefficientGivesIdentityGram) {
  const std::vector<double> c{1.0};
  const auto o = build_Omega(c, 5);
  for (double v : o.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  EXPECT_EQ(o * o.transpose(), DenseMatrix::identity(5));
}

TEST(Omega, StacksOverRemovedRowToCirculant) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {1u, 2u, 5u, 9u}) {
    std::vector<double> c(n + 1);
    for (auto& v : c) v = u(gen);
    const auto o = build_Omega(c, n);
    const auto circ = build_circulant(c, n + 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= n; ++j) EXPECT_EQ(o(i, j), circ(i, j));
    for (std::size_t j = 0; j <= n; ++j) EXPECT_EQ(circ(n, j), c[j]);
  }
}

TEST(Circulant, SmallExampleAndIdentity) {
  const std::vector<double> ab{3, 7};
  EXPECT_EQ(build_circulant(ab, 2), from_rows({{7, 3}, {3, 7}}));
  const std::vector<double> e{1.0};
  const auto c = build_circulant(e, 4);
  EXPECT_EQ(c * c.transpose(), DenseMatrix::identity(4));
}

std::vector<double> sorted_fourier_values(std::span<const double> c, std::size_t m) {
  const auto f = SpectralDensity::truncated_sum({c.begin(), c.end()});
  std::vector<double> v;
  for (std::size_t k = 0; k < m; ++k) v.push_back(f(2.0 * std::numbers::pi * k / m));
  std::ranges::sort(v);
  return v;
}

TEST(Circulant, EigenvaluesAreSpectralDensitySamples) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t m : {2u, 3u, 8u, 17u}) {
    std::vector<double> c(m);
    for (auto& v : c) v = u(gen);
    const auto circ = build_circulant(c, m);
    const auto ev = sym_eigenvalues(circ * circ.transpose());
    const auto expected = sorted_fourier_values(c, m);
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(ev.eigenvalues()[k], expected[k], 1e-10);
  }
}

TEST(Toeplitz, Examples) {
  const std::vector<double> wn{1.0};
  EXPECT_EQ(build_toeplitz_gamma(wn, 3), DenseMatrix::identity(3));
  const std::vector<double> ma{1.0, 0.5};
  EXPECT_EQ(build_toeplitz_gamma(ma, 2), from_rows({{1.25, 0.5}, {0.5, 1.25}}));
}

TEST(Toeplitz, PositiveSemidefinite) {
  for (const CoefficientModel& m : {CoefficientModel{MovingAverage{{0.9, -0.8, 0.3}}},
                                    CoefficientModel{AutoRegressive1{-0.9}},
                                    CoefficientModel{Farima{0.3}}}) {
    const auto c = coefficients(m, 300);
    EXPECT_GE(sym_eigenvalues(build_toeplitz_gamma(c, 40)).min(), -1e-10);
  }
}

TEST(Gram, Examples) {
  EXPECT_EQ(gram(DenseMatrix::identity(2)), from_rows({{0.5, 0}, {0, 0.5}}));
  EXPECT_EQ(gram(from_rows({{1, 1}, {1, 1}})), from_rows({{1, 1}, {1, 1}}));
}

TEST(Gram, TraceIsScaledSumOfSquaresAndSymmetric) {
  ProcessSpec spec;
  spec.model = MovingAverage{{0.5}};
  spec.innovations.seed = 12;
  const auto x = build_X(spec, {20, 30});
  const auto g = gram(x);
  double sq = 0.0;
  for (double v : x.values()) sq += v * v;
  EXPECT_NEAR(g.trace(), sq / 20.0, 1e-12 * sq);
  EXPECT_EQ(g, g.transpose());
  EXPECT_GE(sym_eigenvalues(g).min(), -1e-10 * g.trace());
}

TEST(ShiftRepresentation, HandExample) {
  ProcessSpec spec;
  spec.model = ExplicitList{{1.0, 0.5, 0.25}};
  spec.innovations.seed = 21;
  const auto check = shift_representation_check(spec, {1, 2});
  EXPECT_TRUE(check.exact);
  // Row 1 of X~ by hand: X_t = Z_t + 0.5 Z_{t-1} + 0.25 Z_{t-2}, t = 1, 2.
  const auto s = spec.innovations.stream();
  const auto xt = build_truncated_X(spec, {1, 2});
  EXPECT_NEAR(xt(0, 0), s(1) + 0.5 * s(0) + 0.25 * s(-1), 1e-15);
  EXPECT_NEAR(xt(0, 1), s(2) + 0.5 * s(1) + 0.25 * s(0), 1e-15);
}

TEST(ShiftRepresentation, WhiteNoiseAndMa2) {
  ProcessSpec spec;
  spec.innovations.seed = 1;
  EXPECT_TRUE(shift_representation_check(spec, {3, 4}).exact);
  spec.model = MovingAverage{{0.37, -0.81}};
  const auto check = shift_representation_check(spec, {3, 4});
  EXPECT_TRUE(check.exact);
  EXPECT_LE(check.max_deviation, 1e-12);
}

TEST(ShiftRepresentation, RandomSmallInstances) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> dim(1, 8), order(0, 3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    ProcessSpec spec;
    std::vector<double> theta(order(gen));
    for (auto& t : theta) t = u(gen);
    spec.model = MovingAverage{theta};
    spec.innovations.seed = gen();
    const auto check = shift_representation_check(spec, {dim(gen), dim(gen)});
    EXPECT_TRUE(check.exact) << trial;
    EXPECT_LE(check.max_deviation, 1e-12);
  }
}

TEST(ShiftRepresentation, RejectsLargeShapes) {
  EXPECT_THROW(shift_representation_check(ProcessSpec{}, {200, 200}), ValidationError);
}

TEST(Shape, Validation) {
  EXPECT_THROW((MatrixShape{0, 3}.validate()), ValidationError);
  EXPECT_THROW((MatrixShape{3, 0}.validate()), ValidationError);
}

}  // namespace
}  // namespace lpmat
