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
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lpmat/distance.hpp"
#include "lpmat/marchenko_pastur.hpp"
#include "lpmat/matrix.hpp"
#include "lpmat/spectra.hpp"

namespace lpmat {
namespace {

DenseMatrix random_symmetric(std::size_t p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  DenseMatrix m(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) m(i, j) = m(j, i) = g(gen);
  return m;
}

std::vector<double> eigen_oracle(const DenseMatrix& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::ranges::sort(v);
  return v;
}

TEST(Eigenvalues, SmallExamples) {
  DenseMatrix a(2, 2);
  a(0, 0) = a(1, 1) = 2;
  a(0, 1) = a(1, 0) = 1;
  auto ev = sym_eigenvalues(a);
  EXPECT_NEAR(ev.eigenvalues()[0], 1.0, 1e-14);
  EXPECT_NEAR(ev.eigenvalues()[1], 3.0, 1e-14);

  DenseMatrix b(2, 2);
  b(0, 1) = b(1, 0) = 1;
  ev = sym_eigenvalues(b);
  EXPECT_NEAR(ev.eigenvalues()[0], -1.0, 1e-14);
  EXPECT_NEAR(ev.eigenvalues()[1], 1.0, 1e-14);

  DenseMatrix d(4, 4);
  const double diag[] = {3.0, -1.0, 7.0, 0.5};
  for (int i = 0; i < 4; ++i) d(i, i) = diag[i];
  ev = sym_eigenvalues(d);
  EXPECT_EQ(std::vector<double>(ev.eigenvalues().begin(), ev.eigenvalues().end()),
            (std::vector<double>{-1.0, 0.5, 3.0, 7.0}));
}

TEST(Eigenvalues, RejectsAsymmetricInput) {
  DenseMatrix a(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(sym_eigenvalues(a), ValidationError);
  EXPECT_THROW(sym_eigenvalues(DenseMatrix(2, 3)), ValidationError);
}

TEST(Eigenvalues, AgreesWithEigen) {
  for (std::size_t p : {1u, 2u, 7u, 64u, 200u}) {
    const auto m = random_symmetric(p, p);
    const auto ours = sym_eigenvalues(m);
    const auto ref = eigen_oracle(m);
    double scale = 1.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < p; ++k) EXPECT_NEAR(ours.eigenvalues()[k], ref[k], 1e-11 * scale);
  }
}

TEST(Eigenvalues, RepeatedEigenvaluesAndZeroMatrix) {
  const auto zero = sym_eigenvalues(DenseMatrix(5, 5));
  for (double v : zero.eigenvalues()) EXPECT_EQ(v, 0.0);
  // Rank-one Gram matrix: p-1 zeros and one eigenvalue equal to the trace.
  DenseMatrix x(6, 1);
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = static_cast<double>(i) - 2.5;
  const auto g = gram(x);
  const auto ev = sym_eigenvalues(g);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(ev.eigenvalues()[k], 0.0, 1e-14);
  EXPECT_NEAR(ev.max(), g.trace(), 1e-13);
}

// Property: power sums match traces for random symmetric matrices.
TEST(Eigenvalues, TraceIdentities) {
  for (std::size_t p : {16u, 128u, 512u}) {
    const auto m = random_symmetric(p, 1000 + p);
    const auto ev = sym_eigenvalues(m);
    double s1 = 0.0, s2 = 0.0, t2 = 0.0;
    for (double v : ev.eigenvalues()) {
      s1 += v;
      s2 += v * v;
    }
    for (double v : m.values()) t2 += v * v;
    EXPECT_NEAR(s1, m.trace(), 1e-8 * std::max(1.0, std::abs(m.trace())) * std::sqrt(p));
    EXPECT_NEAR(s2, t2, 1e-8 * t2);
  }
}

TEST(Eigenvalues, GramSpectraAreNonNegative) {
  ProcessSpec spec;
  spec.model = AutoRegressive1{0.8};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    spec.innovations.seed = seed;
    const auto ev = sym_eigenvalues(gram(build_X(spec, {40, 10})));
    EXPECT_GE(ev.min(), -1e-10 * std::max(1.0, ev.max()));
  }
}

TEST(EsdCdf, Examples) {
  const EmpiricalSpectrum s({3.0, 1.0});
  EXPECT_EQ(esd_cdf(s, 2.0), 0.5);
  EXPECT_EQ(esd_cdf(s, 0.0), 0.0);
  EXPECT_EQ(esd_cdf(s, 9.0), 1.0);
  EXPECT_EQ(esd_cdf(EmpiricalSpectrum({1.0, 1.0, 1.0}), 1.0), 1.0);
}

TEST(EmpiricalStieltjes, Examples) {
  using namespace std::complex_literals;
  const auto a = empirical_stieltjes(EmpiricalSpectrum({1.0}), 1i);
  EXPECT_NEAR(a.real(), 0.5, 1e-15);
  EXPECT_NEAR(a.imag(), 0.5, 1e-15);
  const auto b = empirical_stieltjes(EmpiricalSpectrum({0.0}), 1i);
  EXPECT_NEAR(b.real(), 0.0, 1e-15);
  EXPECT_NEAR(b.imag(), 1.0, 1e-15);
  const EmpiricalSpectrum s({-3.0, 0.2, 5.0, 8.0});
  const std::complex<double> z = 1e6i;
  EXPECT_LE(std::abs(empirical_stieltjes(s, z) * z + 1.0), 1e-4 * 8.0);
  EXPECT_THROW(empirical_stieltjes(s, 1.0), ValidationError);
}

TEST(EmpiricalStieltjes, UpperHalfPlaneAndBound) {
  const auto s = sym_eigenvalues(random_symmetric(30, 5));
  for (double eps : {1e-3, 0.1, 2.0})
    for (double x : {-5.0, 0.0, 1.3, 9.0}) {
      const auto v = empirical_stieltjes(s, {x, eps});
      EXPECT_GT(v.imag(), 0.0);
      EXPECT_LE(std::abs(v), 1.0 / eps * (1 + 1e-12));
    }
}

TEST(Pool, IsAValidCdf) {
  std::vector<EmpiricalSpectrum> parts{EmpiricalSpectrum({1.0, 2.0}), EmpiricalSpectrum({0.5, 3.0})};
  const auto pooled = pool(parts);
  EXPECT_EQ(pooled.size(), 4u);
  EXPECT_EQ(esd_cdf(pooled, 0.0), 0.0);
  EXPECT_EQ(esd_cdf(pooled, 1.0), 0.5);
  EXPECT_EQ(esd_cdf(pooled, 3.0), 1.0);
}

TEST(Histogram, MassesSumToOne) {
  const auto s = sym_eigenvalues(random_symmetric(50, 6));
  const auto h = histogram(s, 7);
  double total = 0.0;
  for (const auto& b : h) total += b.mass;
  EXPECT_NEAR(total, 1.0, 1e-12);
  std::ostringstream os;
  write_histogram_csv(os, h);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "bin_left,bin_right,mass");
}

TEST(Ks, Examples) {
  const EmpiricalSpectrum a({0.0, 1.0}), b({0.0, 2.0});
  EXPECT_EQ(ks_distance(a, a), 0.0);
  EXPECT_EQ(ks_distance(EmpiricalSpectrum({0.0}), EmpiricalSpectrum({1.0})), 1.0);
  EXPECT_DOUBLE_EQ(ks_distance(a, b), 0.5);
}

TEST(Wasserstein, Examples) {
  const auto view = [](std::vector<double> v) { return CdfView::of(EmpiricalSpectrum(std::move(v))); };
  EXPECT_NEAR(wasserstein1(view({0.0, 1.0}), view({0.0, 1.0})), 0.0, 1e-12);
  EXPECT_NEAR(wasserstein1(view({0.0}), view({1.0})), 1.0, 1e-9);
  EXPECT_NEAR(wasserstein1(view({0.0, 2.0}), view({1.0, 1.0})), 1.0, 1e-9);
}

TEST(Wasserstein, ShiftedEmpiricalMeasures) {
  // W1 between a sample and its translate by t is t.
  std::vector<double> v{0.1, 0.7, 1.3, 2.0};
  std::vector<double> w = v;
  for (auto& x : w) x += 0.25;
  EXPECT_NEAR(wasserstein1(CdfView::of(EmpiricalSpectrum(v)), CdfView::of(EmpiricalSpectrum(w))),
              0.25, 1e-9);
}

// Property: KS is symmetric, bounded and satisfies the triangle inequality.
TEST(Ks, MetricOnRandomTriples) {
  std::mt19937_64 gen(8);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EmpiricalSpectrum> s;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> v(1 + gen() % 20);
      for (auto& x : v) x = e(gen);
      s.emplace_back(v);
    }
    const double ab = ks_distance(s[0], s[1]), ba = ks_distance(s[1], s[0]);
    const double bc = ks_distance(s[1], s[2]), ac = ks_distance(s[0], s[2]);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_LE(ac, ab + bc + 1e-15);
  }
}

TEST(Ks, ContinuousVersusEmpiricalHitsTheStepSup) {
  // ESD of a single point at the MP median is 1/2 away from MP on both sides.
  const auto mp = mp_oracle(1.0, 1.0);
  double lo = 0.0, hi = 4.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mp.cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  EXPECT_NEAR(ks_distance(CdfView::of(EmpiricalSpectrum({lo})), mp.view()), 0.5, 1e-6);
}

TEST(MarchenkoPastur, Examples) {
  const auto mp = mp_oracle(1.0, 1.0);
  EXPECT_NEAR(mp.density(2.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_DOUBLE_EQ(mp.lower_edge(), 0.0);
  EXPECT_DOUBLE_EQ(mp.upper_edge(), 4.0);
  EXPECT_DOUBLE_EQ(mp_oracle(4.0, 1.0).atom(), 0.75);
  EXPECT_DOUBLE_EQ(mp_oracle(0.5, 1.0).atom(), 0.0);
}

TEST(MarchenkoPastur, CdfIntegratesDensityAndStieltjesInverts) {
  for (double y : {0.25, 0.5, 2.0}) {
    const auto mp = mp_oracle(y, 1.0 / y);
    EXPECT_NEAR(mp.cdf(mp.upper_edge()), 1.0, 1e-10);
    EXPECT_NEAR(mp.cdf(mp.lower_edge() - 1e-9), y > 1 ? 1.0 - 1.0 / y : 0.0, 1e-12);
    const double x = 0.5 * (mp.lower_edge() + mp.upper_edge());
    const auto s = mp.stieltjes({x, 1e-9});
    EXPECT_NEAR(s.imag() / std::numbers::pi, mp.density(x), 1e-6);
    // Simpson on the density itself as a separate route to the CDF.
    const int m = 20000;
    const double a = mp.lower_edge(), h = (x - a) / m;
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc += h * mp.density(a + (k + 0.5) * h);
    EXPECT_NEAR(mp.cdf(x) - mp.atom(), acc, 1e-5);
  }
}

}  // namespace
}  // namespace lpmat
