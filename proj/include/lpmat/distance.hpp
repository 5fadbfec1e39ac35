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

// Distances between one-dimensional distributions given by their CDFs.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "lpmat/spectra.hpp"

namespace lpmat {

/// A CDF together with what is needed to evaluate distances exactly: the
/// jump locations and the support hull.
struct CdfView {
  std::function<double(double)> cdf;
  std::vector<double> steps;
  double lo = 0.0;
  double hi = 0.0;
  /// True when the law has an absolutely continuous part.
  bool continuous = false;

  double operator()(double x) const { return cdf(x); }

  static CdfView of(EmpiricalSpectrum spectrum) {
    auto shared = std::make_shared<const EmpiricalSpectrum>(std::move(spectrum));
    CdfView view;
    view.lo = shared->min();
    view.hi = shared->max();
    view.steps.assign(shared->eigenvalues().begin(), shared->eigenvalues().end());
    view.steps.erase(std::unique(view.steps.begin(), view.steps.end()), view.steps.end());
    view.cdf = [shared](double x) { return esd_cdf(*shared, x); };
    return view;
  }
};

inline constexpr std::size_t kKsGridPoints = 4096;

/// sup_x |F(x) - G(x)|, evaluated at every jump of either CDF from both sides,
/// plus a uniform grid over the joint hull when either law is continuous.
/// Exact whenever at most one of the two is continuous.
inline double ks_distance(const CdfView& f, const CdfView& g,
                          std::size_t grid_points = kKsGridPoints) {
  double sup = 0.0;
  auto probe = [&](double x) { sup = std::max(sup, std::abs(f(x) - g(x))); };
  for (const auto* view : {&f, &g}) {
    for (double s : view->steps) {
      probe(s);
      probe(std::nextafter(s, -std::numeric_limits<double>::infinity()));
    }
  }
  if ((f.continuous || g.continuous) && grid_points > 1) {
    const double lo = std::min(f.lo, g.lo);
    const double hi = std::max(f.hi, g.hi);
    for (std::size_t k = 0; k < grid_points; ++k) {
      probe(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1));
    }
  }
  return std::min(1.0, sup);
}

inline double ks_distance(const EmpiricalSpectrum& a, const EmpiricalSpectrum& b) {
  return ks_distance(CdfView::of(a), CdfView::of(b));
}

/// integral |F - G| dx over the joint hull. The hull is cut at every jump and
/// at `grid_points` uniform knots; each piece is integrated by adaptive
/// trapezoid with endpoint values taken just inside the piece, so step
/// functions are integrated exactly.
inline double wasserstein1(const CdfView& f, const CdfView& g,
                           std::size_t grid_points = kKsGridPoints) {
  const double lo = std::min(f.lo, g.lo);
  const double hi = std::max(f.hi, g.hi);
  if (!(hi > lo)) return 0.0;
  std::vector<double> knots{lo, hi};
  knots.insert(knots.end(), f.steps.begin(), f.steps.end());
  knots.insert(knots.end(), g.steps.begin(), g.steps.end());
  if (f.continuous || g.continuous) {
    for (std::size_t k = 1; k + 1 < grid_points; ++k)
      knots.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1));
  }
  std::ranges::sort(knots);
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  auto gap = [&](double x) { return std::abs(f(x) - g(x)); };
  std::function<double(double, double, double, double, int)> refine =
      [&](double a, double b, double fa, double fb, int depth) {
        const double mid = 0.5 * (a + b);
        const double fm = gap(mid);
        const double coarse = 0.5 * (b - a) * (fa + fb);
        const double fine = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
        if (depth >= 12 || std::abs(fine - coarse) <= 1e-12 * std::max(1.0, b - a)) return fine;
        return refine(a, mid, fa, fm, depth + 1) + refine(mid, b, fm, fb, depth + 1);
      };
  double total = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    total += refine(a, b, gap(std::nextafter(a, inf)), gap(std::nextafter(b, -inf)), 0);
  }
  return total;
}

}  // namespace lpmat
