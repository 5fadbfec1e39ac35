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

// Limiting spectral distribution of p^{-1} X X^T: the Stieltjes transform s
// solves
//
//   1/s = -z + y~ * I(s),   I(s) = kappa * (1/N) sum_k f(w_k) / (1 + f(w_k) s)
//
// with w_k = 2 pi k / N. The equation variant fixes kappa (1 or 2 pi), the
// ratio y~ (p/n or n/p) and whether s is read as the transform of the p x p
// matrix itself or of its n x n companion. The density follows from
// rho(x) = (1/pi) lim_{eps -> 0+} Im s(x + i eps).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "lpmat/distance.hpp"
#include "lpmat/error.hpp"
#include "lpmat/process.hpp"

namespace lpmat {

enum class IntegralNormalization { Normalized, RawDOmega };
enum class RatioInterpretation { YasPrinted, YInverse };
enum class TransformRole { Direct, Companion };

struct EquationVariant {
  IntegralNormalization normalization = IntegralNormalization::Normalized;
  RatioInterpretation ratio = RatioInterpretation::YInverse;
  TransformRole role = TransformRole::Direct;

  /// (1/2pi) normalization, ratio y = p/n, direct transform.
  static constexpr EquationVariant printed() {
    return {IntegralNormalization::Normalized, RatioInterpretation::YasPrinted,
            TransformRole::Direct};
  }
  /// The variant selected by Monte Carlo calibration; also the default.
  static constexpr EquationVariant calibrated() { return {}; }

  /// All eight combinations in a fixed order.
  static std::vector<EquationVariant> all() {
    std::vector<EquationVariant> out;
    for (auto n : {IntegralNormalization::Normalized, IntegralNormalization::RawDOmega})
      for (auto r : {RatioInterpretation::YasPrinted, RatioInterpretation::YInverse})
        for (auto t : {TransformRole::Direct, TransformRole::Companion}) out.push_back({n, r, t});
    return out;
  }

  bool operator==(const EquationVariant&) const = default;
};

/// "normalized,yinv,direct" and friends.
inline std::string to_string(const EquationVariant& v) {
  std::string out = v.normalization == IntegralNormalization::Normalized ? "normalized" : "raw";
  out += v.ratio == RatioInterpretation::YasPrinted ? ",y" : ",yinv";
  out += v.role == TransformRole::Direct ? ",direct" : ",companion";
  return out;
}

/// Accepts three tokens separated by ',', ':' or 'x' in any order.
inline EquationVariant parse_variant(std::string_view text) {
  EquationVariant v;
  bool seen[3] = {false, false, false};
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    int axis = -1;
    if (token == "normalized") { v.normalization = IntegralNormalization::Normalized; axis = 0; }
    else if (token == "raw") { v.normalization = IntegralNormalization::RawDOmega; axis = 0; }
    else if (token == "y") { v.ratio = RatioInterpretation::YasPrinted; axis = 1; }
    else if (token == "yinv") { v.ratio = RatioInterpretation::YInverse; axis = 1; }
    else if (token == "direct") { v.role = TransformRole::Direct; axis = 2; }
    else if (token == "companion") { v.role = TransformRole::Companion; axis = 2; }
    if (axis < 0 || seen[axis])
      throw ValidationError("bad equation variant token '" + token + "'", "variant");
    seen[axis] = true;
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ':' || ch == 'x' || ch == ' ') flush();
    else token += ch;
  }
  flush();
  if (!(seen[0] && seen[1] && seen[2]))
    throw ValidationError("equation variant needs one token per axis, e.g. normalized,yinv,direct",
                          "variant");
  return v;
}

struct SolverConfig {
  std::size_t quadrature_points = 2048;
  std::size_t max_iterations = 500;
  double damping = 0.5;
  double residual_tol = 1e-10;
  double epsilon_floor = 1e-6;
  /// Newton steps on the equation, taken only when they reduce the residual.
  bool accelerate = true;

  void validate() const {
    if (quadrature_points == 0) throw ValidationError("quadrature_points must be positive", "quadrature_points");
    if (max_iterations == 0) throw ValidationError("max_iterations must be positive", "max_iterations");
    if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]", "damping");
    if (!(residual_tol > 0.0)) throw ValidationError("residual_tol must be positive", "residual_tol");
    if (!(epsilon_floor > 0.0)) throw ValidationError("epsilon_floor must be positive", "epsilon_floor");
  }
};

struct FixedPoint {
  std::complex<double> s;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Fixed-point solver for one (f, y, variant); caches f on the quadrature
/// nodes so repeated solves only pay for the iteration.
class StieltjesSolver {
 public:
  StieltjesSolver(const SpectralDensity& f, double y, EquationVariant variant,
                  SolverConfig config = {})
      : y_(y), variant_(variant), config_(config) {
    config_.validate();
    if (!(y > 0.0) || !std::isfinite(y)) throw ValidationError("aspect ratio y must be positive", "y");
    nodes_ = f.sample(config_.quadrature_points);
    for (double v : nodes_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError("spectral density must be finite and non-negative");
    weight_ = (variant.normalization == IntegralNormalization::Normalized ? 1.0
                                                                          : 2.0 * std::numbers::pi) /
              static_cast<double>(nodes_.size());
    ratio_ = variant.ratio == RatioInterpretation::YasPrinted ? y : 1.0 / y;
  }

  double y() const noexcept { return y_; }
  double equation_ratio() const noexcept { return ratio_; }
  const EquationVariant& variant() const noexcept { return variant_; }
  const SolverConfig& config() const noexcept { return config_; }
  double f_max() const { return *std::ranges::max_element(nodes_); }

  /// Trapezoid rule for the variant-normalized integral of f / (1 + f s).
  std::complex<double> integral(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (double fk : nodes_) {
      const std::complex<double> den = 1.0 + fk * s;
      if (std::abs(den) < 1e-12) throw NumericalError("near-singular integrand 1 + f(w) s");
      acc += fk / den;
    }
    return weight_ * acc;
  }

  /// The map T(s) = 1 / (-z + y~ I(s)).
  std::complex<double> map(std::complex<double> z, std::complex<double> s) const {
    return 1.0 / (-z + ratio_ * integral(s));
  }

  /// |1/s + z - y~ I(s)| / max(1, |z|).
  double residual(std::complex<double> z, std::complex<double> s) const {
    return std::abs(1.0 / s + z - ratio_ * integral(s)) / std::max(1.0, std::abs(z));
  }

  /// I(s) and its derivative I'(s) = -integral of f^2 / (1 + f s)^2.
  std::pair<std::complex<double>, std::complex<double>> integral_with_derivative(
      std::complex<double> s) const {
    std::complex<double> acc = 0.0, dacc = 0.0;
    for (double fk : nodes_) {
      const std::complex<double> den = 1.0 + fk * s;
      if (std::abs(den) < 1e-12) throw NumericalError("near-singular integrand 1 + f(w) s");
      const std::complex<double> q = fk / den;
      acc += q;
      dacc -= q * q;
    }
    return {weight_ * acc, weight_ * dacc};
  }

  /// Solution of the equation itself (before any companion conversion).
  /// Newton on G(s) = s F(s) = 1 + z s - y~ s I(s) when the full step stays
  /// in the upper half-plane, halving it until |G| decreases; otherwise one
  /// damped step s <- s + alpha (T(s) - s). Tries `start`, then -1/z,
  /// then two points on the imaginary axis; leaving the upper half-plane
  /// restarts the current start with half the damping. Convergence is
  /// declared on |F(s)| / max(1, |z|).
  FixedPoint solve_equation(std::complex<double> z,
                            std::optional<std::complex<double>> start = std::nullopt) const {
    if (!(z.imag() > 0.0)) throw ValidationError("Stieltjes solver needs Im z > 0", "z");
    const double scale = std::max(1.0, std::abs(z));
    auto g_of = [&](std::complex<double> s, std::complex<double> i_s) {
      return 1.0 + z * s - ratio_ * s * i_s;
    };
    double last = std::numeric_limits<double>::infinity();
    std::vector<std::complex<double>> starts;
    if (start && start->imag() > 0.0) starts.push_back(*start);
    starts.push_back(-1.0 / z);
    starts.push_back({0.0, 1.0 / std::sqrt(std::abs(z))});
    starts.push_back({0.0, 1.0});
    for (const auto& s0 : starts) {
      double alpha = config_.damping;
      for (int restart = 0; restart < 8; ++restart, alpha *= 0.5) {
        std::complex<double> s = s0;
        bool left_half_plane = false;
        auto [i_s, di_s] = integral_with_derivative(s);
        for (std::size_t it = 0; it < config_.max_iterations; ++it) {
          const std::complex<double> g = g_of(s, i_s);
          last = std::abs(g / s) / scale;
          if (last <= config_.residual_tol) return {s, last, it};
          if (config_.accelerate) {
            std::complex<double> step = g / (z - ratio_ * (i_s + s * di_s));
            bool moved = false;
            // A full step out of the upper half-plane aims at the conjugate
            // branch; leave that case to the contraction.
            const bool aimed = (s - step).imag() > 0.0;
            for (int half = 0; aimed && half < 30 && !moved && std::isfinite(std::abs(step)); ++half) {
              const std::complex<double> cand = s - step;
              step *= 0.5;
              if (!(cand.imag() > 0.0)) continue;
              const auto [i_c, di_c] = integral_with_derivative(cand);
              if (std::abs(g_of(cand, i_c)) < std::abs(g)) {
                s = cand;
                i_s = i_c;
                di_s = di_c;
                moved = true;
              }
            }
            if (moved) continue;
          }
          s += alpha * (1.0 / (-z + ratio_ * i_s) - s);
          if (!(s.imag() > 0.0) || !std::isfinite(std::abs(s))) {
            left_half_plane = true;
            break;
          }
          std::tie(i_s, di_s) = integral_with_derivative(s);
        }
        if (!left_half_plane) break;
      }
    }
    std::ostringstream os;
    os << "Stieltjes fixed point did not converge at z = " << z.real() << "+" << z.imag()
       << "i (last residual " << last << ")";
    throw NonConvergenceError(os.str(), last, z);
  }

  /// Converts an equation solution into the transform of the p x p matrix.
  /// The companion reading treats s as the transform of the n x n matrix
  /// p^{-1} X^T X and uses n s_n = p s_p - (n - p) / z with y = p/n.
  std::complex<double> to_matrix_transform(std::complex<double> z, std::complex<double> s) const {
    if (variant_.role == TransformRole::Direct) return s;
    return (s + (1.0 - y_) / z) / y_;
  }

  std::complex<double> solve(std::complex<double> z,
                             std::optional<std::complex<double>> start = std::nullopt) const {
    return to_matrix_transform(z, solve_equation(z, start).s);
  }

 private:
  double y_;
  EquationVariant variant_;
  SolverConfig config_;
  std::vector<double> nodes_;
  double weight_ = 0.0;
  double ratio_ = 0.0;
};

inline std::complex<double> quadrature_integral(const SpectralDensity& f, std::complex<double> s,
                                                EquationVariant variant,
                                                const SolverConfig& config = {}) {
  return StieltjesSolver(f, 1.0, variant, config).integral(s);
}

inline std::complex<double> solve_stieltjes(const SpectralDensity& f, double y,
                                            std::complex<double> z, EquationVariant variant = {},
                                            const SolverConfig& config = {}) {
  return StieltjesSolver(f, y, variant, config).solve(z);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Solved limiting law on an x grid.
struct LsdSolution {
  double y = 1.0;
  EquationVariant variant;
  std::vector<double> grid;
  /// Matrix transform at x + i epsilon_floor.
  std::vector<std::complex<double>> s;
  /// Richardson-extrapolated density before clipping.
  std::vector<double> raw_density;
  std::vector<double> density;
  std::vector<double> cdf;
  double atom = 0.0;
  /// rho ~ x^beta on (0, grid[0]), fitted from the first two samples.
  double origin_exponent = 1.0;
  Interval support;
};

namespace detail {

/// Density on a strictly increasing positive grid; fills s and raw density.
inline void density_on_grid(const StieltjesSolver& solver, std::span<const double> grid,
                            std::vector<std::complex<double>>& s_out, std::vector<double>& rho) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || (k > 0 && !(grid[k] > grid[k - 1])))
      throw ValidationError("density grid must be positive and strictly increasing", "x_grid");
  }
  const double eps = solver.config().epsilon_floor;
  s_out.resize(grid.size());
  rho.resize(grid.size());
  // Sweep downwards: -1/z is a good start far to the right, and each point
  // warm-starts its left neighbour.
  std::optional<std::complex<double>> warm1;
  std::optional<std::complex<double>> warm2;
  for (std::size_t k = grid.size(); k-- > 0;) {
    const std::complex<double> z1{grid[k], eps};
    const std::complex<double> z2{grid[k], 2.0 * eps};
    try {
      const FixedPoint a = solver.solve_equation(z1, warm1);
      const FixedPoint b = solver.solve_equation(z2, warm2 ? warm2 : a.s);
      warm1 = a.s;
      warm2 = b.s;
      const auto s1 = solver.to_matrix_transform(z1, a.s);
      const auto s2 = solver.to_matrix_transform(z2, b.s);
      s_out[k] = s1;
      rho[k] = (2.0 * s1.imag() - s2.imag()) / std::numbers::pi;
    } catch (const NonConvergenceError& e) {
      std::ostringstream os;
      os << e.what() << " while evaluating the density at x = " << grid[k];
      throw NonConvergenceError(os.str(), e.last_residual(), e.z());
    }
  }
}

}  // namespace detail

/// rho(x) = (1/pi) lim Im s(x + i eps), Richardson-extrapolated from
/// eps in {eps0, 2 eps0}. Not clipped.
inline std::vector<double> lsd_density(const SpectralDensity& f, double y,
                                       std::span<const double> x_grid,
                                       EquationVariant variant = {},
                                       const SolverConfig& config = {}) {
  const StieltjesSolver solver(f, y, variant, config);
  std::vector<std::complex<double>> s;
  std::vector<double> rho;
  detail::density_on_grid(solver, x_grid, s, rho);
  return rho;
}

inline constexpr double kDensityFloor = 1e-6;

/// Smallest interval holding every grid point with density above `floor`.
inline Interval support_estimate(const LsdSolution& sol, double floor = kDensityFloor) {
  Interval out{0.0, 0.0};
  bool any = false;
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    if (sol.density[k] > floor) {
      if (!any) out.lo = sol.grid[k];
      out.hi = sol.grid[k];
      any = true;
    }
  }
  return out;
}

/// Equispaced grid of `points` values on (0, upper], with upper a bound on
/// the support of the law the variant describes,
/// 1.05 max f (1 + sqrt(kappa y~))^2, refined geometrically towards the
/// origin down to 64 epsilon_floor.
inline std::vector<double> default_lsd_grid(const SpectralDensity& f, double y,
                                            EquationVariant variant, std::size_t points = 1024,
                                            const SolverConfig& config = {}) {
  if (points < 2) throw ValidationError("grid needs at least two points", "grid_points");
  const double kappa =
      variant.normalization == IntegralNormalization::Normalized ? 1.0 : 2.0 * std::numbers::pi;
  const double ratio = variant.ratio == RatioInterpretation::YasPrinted ? y : 1.0 / y;
  const double upper = 1.05 * f.max_value() * std::pow(1.0 + std::sqrt(kappa * ratio), 2);
  std::vector<double> grid;
  const double first = upper / static_cast<double>(points);
  for (double x = 0.5 * first; x >= 64.0 * config.epsilon_floor && grid.size() < 40; x *= 0.5)
    grid.push_back(x);
  std::ranges::reverse(grid);
  for (std::size_t k = 0; k < points; ++k)
    grid.push_back(upper * static_cast<double>(k + 1) / static_cast<double>(points));
  return grid;
}

/// Density, CDF, atom and support on `x_grid`. The atom at zero is
/// 1 - integral(rho) (clipped to [0, 1]); the CDF is the atom plus the
/// cumulative integral of the clipped density, capped at one.
inline LsdSolution solve_lsd(const SpectralDensity& f, double y, std::vector<double> x_grid,
                             EquationVariant variant = {}, const SolverConfig& config = {}) {
  const StieltjesSolver solver(f, y, variant, config);
  LsdSolution sol;
  sol.y = y;
  sol.variant = variant;
  sol.grid = std::move(x_grid);
  detail::density_on_grid(solver, sol.grid, sol.s, sol.raw_density);
  sol.density.resize(sol.grid.size());
  std::ranges::transform(sol.raw_density, sol.density.begin(),
                         [](double r) { return std::max(0.0, r); });

  // Mass on (0, grid[0]) from a power law through the first two samples,
  // which captures square-root singularities at the origin.
  const auto& x = sol.grid;
  const auto& rho = sol.density;
  double head = 0.5 * x[0] * rho[0];
  sol.origin_exponent = 1.0;
  if (x.size() > 1 && rho[0] > 0.0 && rho[1] > 0.0) {
    sol.origin_exponent = std::clamp(std::log(rho[1] / rho[0]) / std::log(x[1] / x[0]), -0.95, 2.0);
    head = x[0] * rho[0] / (sol.origin_exponent + 1.0);
  }
  std::vector<double> cumulative(x.size());
  double acc = head;
  cumulative[0] = acc;
  // Trapezoid in u = sqrt(x): rho dx = 2 u rho du is bounded where rho has an
  // inverse square-root singularity at the origin.
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double u0 = std::sqrt(x[k - 1]);
    const double u1 = std::sqrt(x[k]);
    acc += (u1 - u0) * (u0 * rho[k - 1] + u1 * rho[k]);
    cumulative[k] = acc;
  }
  sol.atom = std::clamp(1.0 - acc, 0.0, 1.0);
  sol.cdf.resize(sol.grid.size());
  for (std::size_t k = 0; k < sol.grid.size(); ++k)
    sol.cdf[k] = std::clamp(sol.atom + cumulative[k], 0.0, 1.0);
  sol.support = support_estimate(sol);
  return sol;
}

inline LsdSolution solve_lsd(const SpectralDensity& f, double y, EquationVariant variant = {},
                             const SolverConfig& config = {}, std::size_t grid_points = 1024) {
  return solve_lsd(f, y, default_lsd_grid(f, y, variant, grid_points, config), variant, config);
}

/// CDF through the grid samples, linear in sqrt(x) between samples and
/// following the fitted power law between the origin (value: atom) and the
/// first grid point; zero below the origin, the last sample beyond the grid.
inline CdfView lsd_cdf(const LsdSolution& sol) {
  if (sol.grid.empty()) throw ValidationError("LSD solution has no grid");
  struct Data {
    std::vector<double> x;
    std::vector<double> F;
    double power = 2.0;
  };
  auto data = std::make_shared<Data>();
  data->power = sol.origin_exponent + 1.0;
  data->x.push_back(0.0);
  data->F.push_back(sol.atom);
  data->x.insert(data->x.end(), sol.grid.begin(), sol.grid.end());
  data->F.insert(data->F.end(), sol.cdf.begin(), sol.cdf.end());
  // Monotone by construction; enforce against rounding.
  for (std::size_t k = 1; k < data->F.size(); ++k) data->F[k] = std::max(data->F[k], data->F[k - 1]);

  CdfView view;
  view.lo = 0.0;
  view.hi = sol.grid.back();
  view.continuous = true;
  if (sol.atom > 0.0) view.steps = {0.0};
  view.cdf = [data](double x) {
    if (x < 0.0) return 0.0;
    const auto& xs = data->x;
    if (x >= xs.back()) return data->F.back();
    const auto it = std::ranges::upper_bound(xs, x);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    double t = 0.0;
    if (k == 1) {
      t = std::pow(x / xs[1], data->power);
    } else {
      const double u0 = std::sqrt(xs[k - 1]);
      t = (std::sqrt(x) - u0) / (std::sqrt(xs[k]) - u0);
    }
    return data->F[k - 1] + t * (data->F[k] - data->F[k - 1]);
  };
  return view;
}

}  // namespace lpmat
