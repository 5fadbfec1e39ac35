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

// Closed-form Marchenko-Pastur law: the limiting spectral distribution of
// Gram matrices with i.i.d. entries.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "lpmat/distance.hpp"
#include "lpmat/error.hpp"

namespace lpmat {

/// Marchenko-Pastur law with ratio y and scale sigma2: density
/// sqrt((b - x)(x - a)) / (2 pi sigma2 y x) on [a, b], a, b =
/// sigma2 (1 -+ sqrt y)^2, plus an atom of mass max(0, 1 - 1/y) at zero.
///
/// The ESD of p^{-1} X X^T for white noise with y = p/n converges to
/// MarchenkoPastur(y, 1/y).
class MarchenkoPastur {
 public:
  MarchenkoPastur(double y, double sigma2) : y_(y), sigma2_(sigma2) {
    if (!(y > 0.0) || !(sigma2 > 0.0) || !std::isfinite(y) || !std::isfinite(sigma2))
      throw ValidationError("Marchenko-Pastur parameters must be positive and finite", "y");
    const double r = std::sqrt(y);
    lower_ = sigma2 * (1.0 - r) * (1.0 - r);
    upper_ = sigma2 * (1.0 + r) * (1.0 + r);
    atom_ = std::max(0.0, 1.0 - 1.0 / y);
  }

  double y() const noexcept { return y_; }
  double sigma2() const noexcept { return sigma2_; }
  double lower_edge() const noexcept { return lower_; }
  double upper_edge() const noexcept { return upper_; }
  double atom() const noexcept { return atom_; }

  double density(double x) const {
    if (x <= lower_ || x >= upper_ || x <= 0.0) return 0.0;
    return std::sqrt((upper_ - x) * (x - lower_)) /
           (2.0 * std::numbers::pi * sigma2_ * y_ * x);
  }

  /// Atom plus the integral of the density, by Simpson's rule in the angle
  /// x = m - r cos(theta), which removes both square-root edges.
  double cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x <= lower_) return atom_;
    if (x >= upper_) return 1.0;
    const double mid = 0.5 * (lower_ + upper_);
    const double rad = 0.5 * (upper_ - lower_);
    const double theta_end = std::acos(std::clamp((mid - x) / rad, -1.0, 1.0));
    auto integrand = [&](double theta) {
      const double s = std::sin(theta);
      const double xv = mid - rad * std::cos(theta);
      if (xv <= 1e-300) return rad / (std::numbers::pi * sigma2_ * y_);
      return rad * rad * s * s / (2.0 * std::numbers::pi * sigma2_ * y_ * xv);
    };
    constexpr int kIntervals = 512;
    const double h = theta_end / kIntervals;
    double acc = integrand(0.0) + integrand(theta_end);
    for (int k = 1; k < kIntervals; ++k) acc += (k % 2 ? 4.0 : 2.0) * integrand(h * k);
    return std::min(1.0, atom_ + acc * h / 3.0);
  }

  /// Root of y sigma2 z s^2 + (z - sigma2 (1 - y)) s + 1 = 0 in the upper
  /// half plane.
  std::complex<double> stieltjes(std::complex<double> z) const {
    if (!(z.imag() > 0.0)) throw ValidationError("Stieltjes transform needs Im z > 0", "z");
    const std::complex<double> qa = y_ * sigma2_ * z;
    const std::complex<double> qb = z - sigma2_ * (1.0 - y_);
    const std::complex<double> disc = std::sqrt(qb * qb - 4.0 * qa);
    const std::complex<double> r1 = (-qb + disc) / (2.0 * qa);
    const std::complex<double> r2 = (-qb - disc) / (2.0 * qa);
    // The transform satisfies |s| <= 1 / Im z; pick the admissible root.
    auto admissible = [&](std::complex<double> s) {
      return s.imag() > 0.0 && std::abs(s) <= 1.0 / z.imag() * (1.0 + 1e-12);
    };
    if (admissible(r1) && !admissible(r2)) return r1;
    if (admissible(r2) && !admissible(r1)) return r2;
    return r1.imag() > r2.imag() ? r1 : r2;
  }

  CdfView view() const {
    CdfView v;
    v.cdf = [law = *this](double x) { return law.cdf(x); };
    v.lo = atom_ > 0.0 ? 0.0 : lower_;
    v.hi = upper_;
    v.continuous = true;
    if (atom_ > 0.0) v.steps = {0.0};
    return v;
  }

 private:
  double y_;
  double sigma2_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  double atom_ = 0.0;
};

/// Closed-form law for the given ratio and scale.
inline MarchenkoPastur mp_oracle(double y, double sigma2) { return {y, sigma2}; }

}  // namespace lpmat
