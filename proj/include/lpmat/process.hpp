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

// Linear processes X_t = sum_{j>=0} c_j Z_{t-j}: coefficient models, second
// order structure (autocovariance and spectral density) and simulation.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "lpmat/error.hpp"
#include "lpmat/random.hpp"

namespace lpmat {

// ---------------------------------------------------------------------------
// Coefficient models

/// Coefficients given verbatim; c_0 must be non-zero.
struct ExplicitList {
  std::vector<double> coefficients;
};

/// MA(q): X_t = Z_t + theta_1 Z_{t-1} + ... + theta_q Z_{t-q}.
struct MovingAverage {
  std::vector<double> theta;
};

/// AR(1): X_t = phi X_{t-1} + Z_t, |phi| < 1.
struct AutoRegressive1 {
  double phi = 0.0;
};

/// ARMA(p, q) with phi(z) = 1 - phi_1 z - ... and theta(z) = 1 + theta_1 z + ...
struct Arma {
  std::vector<double> phi;
  std::vector<double> theta;
};

/// Fractionally integrated noise (1 - B)^{-d} Z_t, d in (-1/2, 1/2).
struct Farima {
  double d = 0.0;
};

using CoefficientModel =
    std::variant<ExplicitList, MovingAverage, AutoRegressive1, Arma, Farima>;

inline CoefficientModel white_noise() { return ExplicitList{{1.0}}; }

struct InnovationSpec {
  InnovationDistribution distribution = InnovationDistribution::StandardGaussian;
  std::uint64_t seed = 0;

  InnovationStream stream() const noexcept { return {distribution, seed}; }
};

struct ProcessSpec {
  CoefficientModel model = white_noise();
  InnovationSpec innovations;
  /// Largest retained lag J. Unset means "choose automatically".
  std::optional<std::size_t> horizon;
};

/// Longest horizon the automatic choice will pick.
inline constexpr std::size_t kMaxHorizon = std::size_t{1} << 14;
inline constexpr double kDefaultTailTolerance = 1e-12;
inline constexpr double kCausalityTolerance = 1e-10;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string format_root(std::complex<double> r) {
  std::ostringstream os;
  os.precision(12);
  os << r.real() << (r.imag() < 0 ? "-" : "+") << std::abs(r.imag()) << "i";
  return os.str();
}

}  // namespace detail

/// Roots of sum_k a_k z^k (ascending coefficients), by Aberth iteration.
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> ascending) {
  using cd = std::complex<double>;
  std::size_t degree = ascending.size();
  while (degree > 0 && ascending[degree - 1] == 0.0) --degree;
  if (degree <= 1) return {};
  degree -= 1;
  const double lead = ascending[degree];
  std::vector<cd> monic(degree + 1);
  for (std::size_t k = 0; k <= degree; ++k) monic[k] = ascending[k] / lead;

  auto eval = [&](cd z, cd& derivative) {
    cd value = monic[degree];
    derivative = 0.0;
    for (std::size_t k = degree; k-- > 0;) {
      derivative = derivative * z + value;
      value = value * z + monic[k];
    }
    return value;
  };

  // Cauchy bound for the initial circle.
  double radius = 0.0;
  for (std::size_t k = 0; k < degree; ++k) radius = std::max(radius, std::abs(monic[k]));
  radius = 1.0 + radius;
  std::vector<cd> roots(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) /
                         static_cast<double>(degree);
    roots[k] = std::polar(0.5 * radius, angle);
  }
  for (int iter = 0; iter < 500; ++iter) {
    double largest_step = 0.0;
    for (std::size_t i = 0; i < degree; ++i) {
      cd deriv;
      const cd value = eval(roots[i], deriv);
      if (value == cd{}) continue;
      const cd ratio = value / deriv;
      cd repulsion = 0.0;
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != i) repulsion += 1.0 / (roots[i] - roots[j]);
      }
      const cd step = ratio / (1.0 - ratio * repulsion);
      roots[i] -= step;
      largest_step = std::max(largest_step, std::abs(step) / std::max(1.0, std::abs(roots[i])));
    }
    if (largest_step < 1e-15) break;
  }
  return roots;
}

/// phi(z) = 1 - phi_1 z - ... - phi_p z^p in ascending order.
inline std::vector<double> ar_polynomial(std::span<const double> phi) {
  std::vector<double> poly{1.0};
  for (double v : phi) poly.push_back(-v);
  return poly;
}

/// theta(z) = 1 + theta_1 z + ... in ascending order.
inline std::vector<double> ma_polynomial(std::span<const double> theta) {
  std::vector<double> poly{1.0};
  poly.insert(poly.end(), theta.begin(), theta.end());
  return poly;
}

/// Throws CausalityError listing the roots of phi with |root| <= 1 + tol.
inline void check_causal(std::span<const double> phi, double tol = kCausalityTolerance) {
  const auto poly = ar_polynomial(phi);
  std::vector<std::complex<double>> bad;
  for (const auto& r : polynomial_roots(poly)) {
    if (std::abs(r) <= 1.0 + tol) bad.push_back(r);
  }
  if (!bad.empty()) {
    std::string msg = "non-causal autoregressive polynomial; roots in the closed unit disk:";
    for (const auto& r : bad) msg += " " + detail::format_root(r);
    throw CausalityError(msg, std::move(bad));
  }
}

inline void validate(const CoefficientModel& model) {
  auto finite = [](double v) { return std::isfinite(v); };
  std::visit(
      detail::overloaded{
          [&](const ExplicitList& m) {
            if (m.coefficients.empty())
              throw ValidationError("explicit coefficient list is empty", "coefficients");
            if (!std::ranges::all_of(m.coefficients, finite))
              throw ValidationError("explicit coefficients must be finite", "coefficients");
            if (m.coefficients.front() == 0.0)
              throw ValidationError("c_0 must be non-zero", "coefficients");
          },
          [&](const MovingAverage& m) {
            if (!std::ranges::all_of(m.theta, finite))
              throw ValidationError("MA coefficients must be finite", "theta");
          },
          [&](const AutoRegressive1& m) {
            if (!finite(m.phi)) throw ValidationError("phi must be finite", "phi");
            const double v[] = {m.phi};
            check_causal(v);
          },
          [&](const Arma& m) {
            if (!std::ranges::all_of(m.phi, finite) || !std::ranges::all_of(m.theta, finite))
              throw ValidationError("ARMA coefficients must be finite", "phi");
            check_causal(m.phi);
          },
          [&](const Farima& m) {
            if (!(m.d > -0.5 && m.d < 0.5))
              throw ValidationError("FARIMA parameter d must lie in (-0.5, 0.5)", "d");
          },
      },
      model);
}

/// c_0 .. c_{count-1} of the causal MA(infinity) representation.
inline std::vector<double> coefficients(const CoefficientModel& model, std::size_t count) {
  if (count == 0) throw ValidationError("coefficient count must be positive", "count");
  validate(model);
  std::vector<double> c(count, 0.0);
  std::visit(detail::overloaded{
                 [&](const ExplicitList& m) {
                   std::copy_n(m.coefficients.begin(),
                               std::min(count, m.coefficients.size()), c.begin());
                 },
                 [&](const MovingAverage& m) {
                   const auto poly = ma_polynomial(m.theta);
                   std::copy_n(poly.begin(), std::min(count, poly.size()), c.begin());
                 },
                 [&](const AutoRegressive1& m) {
                   c[0] = 1.0;
                   for (std::size_t j = 1; j < count; ++j) c[j] = m.phi * c[j - 1];
                 },
                 [&](const Arma& m) {
                   // Power-series division theta(z) / phi(z).
                   for (std::size_t j = 0; j < count; ++j) {
                     double v = j == 0 ? 1.0 : (j <= m.theta.size() ? m.theta[j - 1] : 0.0);
                     for (std::size_t k = 1; k <= std::min(j, m.phi.size()); ++k) {
                       v += m.phi[k - 1] * c[j - k];
                     }
                     c[j] = v;
                   }
                 },
                 [&](const Farima& m) {
                   c[0] = 1.0;
                   for (std::size_t j = 1; j < count; ++j) {
                     c[j] = c[j - 1] * (static_cast<double>(j) - 1.0 + m.d) /
                            static_cast<double>(j);
                   }
                 },
             },
             model);
  return c;
}

/// Largest lag with a non-zero coefficient, or nullopt for infinite sequences.
inline std::optional<std::size_t> finite_order(const CoefficientModel& model) {
  return std::visit(
      detail::overloaded{
          [](const ExplicitList& m) -> std::optional<std::size_t> {
            std::size_t q = m.coefficients.size();
            while (q > 1 && m.coefficients[q - 1] == 0.0) --q;
            return q - 1;
          },
          [](const MovingAverage& m) -> std::optional<std::size_t> {
            std::size_t q = m.theta.size();
            while (q > 0 && m.theta[q - 1] == 0.0) --q;
            return q;
          },
          [](const AutoRegressive1& m) -> std::optional<std::size_t> {
            if (m.phi == 0.0) return std::size_t{0};
            return std::nullopt;
          },
          [](const Arma& m) -> std::optional<std::size_t> {
            if (std::ranges::all_of(m.phi, [](double v) { return v == 0.0; })) {
              std::size_t q = m.theta.size();
              while (q > 0 && m.theta[q - 1] == 0.0) --q;
              return q;
            }
            return std::nullopt;
          },
          [](const Farima& m) -> std::optional<std::size_t> {
            if (m.d == 0.0) return std::size_t{0};
            return std::nullopt;
          },
      },
      model);
}

/// gamma(h) = sum_j c_j c_{j+|h|} over the available indices.
inline double autocovariance(std::span<const double> c, std::int64_t h) {
  const auto lag = static_cast<std::size_t>(h < 0 ? -h : h);
  double sum = 0.0;
  for (std::size_t j = 0; j + lag < c.size(); ++j) sum += c[j] * c[j + lag];
  return sum;
}

/// Result of choosing a simulation horizon from the coefficient tail.
struct HorizonChoice {
  std::size_t horizon = 0;
  /// sum_{j > horizon} c_j^2 / sum_j c_j^2 at the chosen horizon.
  double tail_ratio = 0.0;
  std::optional<std::string> warning;
};

/// Smallest J with sum_{j>J} c_j^2 <= tol * sum_j c_j^2, capped at `cap`.
inline HorizonChoice tail_horizon(const CoefficientModel& model,
                                  double tol = kDefaultTailTolerance,
                                  std::size_t cap = kMaxHorizon) {
  validate(model);
  if (auto q = finite_order(model)) return {*q, 0.0, std::nullopt};

  HorizonChoice choice;
  if (const auto* fm = std::get_if<Farima>(&model)) {
    // gamma(0) = Gamma(1 - 2d) / Gamma(1 - d)^2
    const double total = std::tgamma(1.0 - 2.0 * fm->d) / std::pow(std::tgamma(1.0 - fm->d), 2);
    double partial = 0.0;
    double cj = 1.0;
    std::size_t j = 0;
    for (;; ++j) {
      if (j > 0) cj *= (static_cast<double>(j) - 1.0 + fm->d) / static_cast<double>(j);
      partial += cj * cj;
      const double ratio = std::max(0.0, total - partial) / total;
      if (ratio <= tol || j == cap) {
        choice = {j, ratio, std::nullopt};
        break;
      }
    }
  } else {
    // Geometric decay: generate until the terms are negligible, then read the
    // tail off suffix sums.
    std::size_t count = 64;
    std::vector<double> c;
    for (;;) {
      c = coefficients(model, count);
      const double last = c.back() * c.back();
      double head = 0.0;
      for (double v : c) head += v * v;
      if (last <= 1e-40 * head || count >= (std::size_t{1} << 22)) break;
      count *= 2;
    }
    std::vector<double> suffix(c.size() + 1, 0.0);
    for (std::size_t j = c.size(); j-- > 0;) suffix[j] = suffix[j + 1] + c[j] * c[j];
    const double total = suffix[0];
    std::size_t j = 0;
    while (j < cap && j + 1 < c.size() && suffix[j + 1] > tol * total) ++j;
    choice = {j, suffix[std::min(j + 1, c.size())] / total, std::nullopt};
  }
  if (choice.tail_ratio > tol) {
    std::ostringstream os;
    os << "tail variance ratio " << choice.tail_ratio << " at horizon cap " << choice.horizon
       << " exceeds tolerance " << tol;
    choice.warning = os.str();
  }
  return choice;
}

/// Simulation horizon for a p x n matrix: the process's own horizon if set,
/// otherwise max(n, tail horizon).
inline std::size_t resolve_horizon(const ProcessSpec& spec, std::size_t n) {
  if (spec.horizon) return *spec.horizon;
  return std::max(n, tail_horizon(spec.model).horizon);
}

/// Copy of `spec` with its horizon pinned for row length n.
inline ProcessSpec with_resolved_horizon(ProcessSpec spec, std::size_t n) {
  spec.horizon = resolve_horizon(spec, n);
  return spec;
}

// ---------------------------------------------------------------------------
// Decay of the coefficients

struct DecayReport {
  /// Smallest C with |c_j| <= C (j + 1)^{-1-delta} over the inspected range.
  double constant = 0.0;
  /// Index attaining the maximum of |c_j| (j + 1)^{1 + delta}.
  std::size_t attained_at = 0;
  std::optional<std::string> warning;
};

inline DecayReport decay_check(std::span<const double> c, double delta) {
  DecayReport report;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double v = std::abs(c[j]) * std::pow(static_cast<double>(j + 1), 1.0 + delta);
    if (v > report.constant) {
      report.constant = v;
      report.attained_at = j;
    }
  }
  // A bound that is still growing at the end of the range is not a bound.
  if (c.size() > 8 && report.attained_at + 1 >= c.size() - c.size() / 10) {
    std::ostringstream os;
    os << "|c_j| (j+1)^{1+delta} still increasing at j = " << report.attained_at
       << "; polynomial decay bound with delta = " << delta << " looks violated";
    report.warning = os.str();
  }
  return report;
}

inline DecayReport decay_check(const CoefficientModel& model, std::size_t count, double delta) {
  const auto c = coefficients(model, count);
  auto report = decay_check(c, delta);
  if (const auto* fm = std::get_if<Farima>(&model); fm && fm->d > 0.0) {
    std::ostringstream os;
    os << "FARIMA with d = " << fm->d
       << " > 0 has c_j ~ j^{d-1}: no constants C, delta > 0 bound |c_j| by C (j+1)^{-1-delta}";
    report.warning = os.str();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Spectral density

/// f(omega) = sum_h gamma(h) e^{-i h omega} = |sum_j c_j e^{-i j omega}|^2.
class SpectralDensity {
 public:
  enum class Provenance { ClosedForm, TruncatedSum };

  /// f == level.
  static SpectralDensity constant(double level) {
    if (!(level >= 0.0) || !std::isfinite(level))
      throw ValidationError("constant spectral density must be finite and non-negative", "level");
    return SpectralDensity(Provenance::ClosedForm, {1.0}, {1.0}, level);
  }

  /// |theta(e^{-i w})|^2 / |phi(e^{-i w})|^2 from ascending polynomials.
  static SpectralDensity rational(std::vector<double> ar_poly, std::vector<double> ma_poly) {
    return SpectralDensity(Provenance::ClosedForm, std::move(ar_poly), std::move(ma_poly), 1.0);
  }

  /// |sum_j c_j e^{-i j w}|^2 for a finite list.
  static SpectralDensity truncated_sum(std::vector<double> c) {
    return SpectralDensity(Provenance::TruncatedSum, {1.0}, std::move(c), 1.0);
  }

  double operator()(double omega) const {
    const std::complex<double> u = std::polar(1.0, -omega);
    const double num = std::norm(horner(numerator_, u));
    if (denominator_.size() == 1) return scale_ * num / (denominator_[0] * denominator_[0]);
    return scale_ * num / std::norm(horner(denominator_, u));
  }

  Provenance provenance() const noexcept { return provenance_; }

  /// f at the nodes 2 pi k / count, k = 0 .. count-1.
  std::vector<double> sample(std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
      out[k] = (*this)(2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(count));
    }
    return out;
  }

  double max_value(std::size_t count = 4096) const {
    const auto s = sample(count);
    return *std::ranges::max_element(s);
  }

 private:
  SpectralDensity(Provenance prov, std::vector<double> den, std::vector<double> num, double scale)
      : provenance_(prov), denominator_(std::move(den)), numerator_(std::move(num)), scale_(scale) {}

  static std::complex<double> horner(const std::vector<double>& a, std::complex<double> u) {
    std::complex<double> acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
    return acc;
  }

  Provenance provenance_;
  std::vector<double> denominator_;
  std::vector<double> numerator_;
  double scale_;
};

/// sum_h gamma(h) e^{-i h omega} for a finite coefficient list; the
/// autocovariance route to f.
inline double spectral_density_from_autocovariance(std::span<const double> c, double omega) {
  double f = autocovariance(c, 0);
  for (std::size_t h = 1; h < c.size(); ++h) {
    f += 2.0 * autocovariance(c, static_cast<std::int64_t>(h)) *
         std::cos(static_cast<double>(h) * omega);
  }
  return f;
}

/// Closed form for the ARMA family, truncated sum (at the process horizon or the
/// automatic tail horizon) otherwise.
inline SpectralDensity spectral_density(const ProcessSpec& spec) {
  validate(spec.model);
  return std::visit(
      detail::overloaded{
          [&](const ExplicitList& m) { return SpectralDensity::truncated_sum(m.coefficients); },
          [&](const MovingAverage& m) {
            return SpectralDensity::rational({1.0}, ma_polynomial(m.theta));
          },
          [&](const AutoRegressive1& m) {
            const double phi[] = {m.phi};
            return SpectralDensity::rational(ar_polynomial(phi), {1.0});
          },
          [&](const Arma& m) {
            return SpectralDensity::rational(ar_polynomial(m.phi), ma_polynomial(m.theta));
          },
          [&](const Farima&) {
            const std::size_t j = spec.horizon.value_or(tail_horizon(spec.model).horizon);
            return SpectralDensity::truncated_sum(coefficients(spec.model, j + 1));
          },
      },
      spec.model);
}

/// True when the model is white noise c = (1).
inline bool is_white_noise(const CoefficientModel& model) {
  const auto q = finite_order(model);
  if (!q || *q != 0) return false;
  return coefficients(model, 1)[0] == 1.0;
}

// ---------------------------------------------------------------------------
// Simulation

/// a * b, or ValidationError when the product leaves the index range.
inline std::size_t checked_product(std::size_t a, std::size_t b, const char* what) {
  constexpr auto limit = static_cast<std::size_t>(std::numeric_limits<std::int64_t>::max() / 4);
  if (a != 0 && b > limit / a) {
    throw ValidationError(std::string(what) + " overflows the platform index range");
  }
  return a * b;
}

/// X_1 .. X_length with X_t = sum_{j=0}^{J} c_j Z_{t-j} and J = `horizon`.
inline std::vector<double> simulate_record(const CoefficientModel& model,
                                           const InnovationStream& stream, std::size_t length,
                                           std::size_t horizon) {
  if (length == 0) throw ValidationError("record length must be positive", "length");
  checked_product(length + horizon, 1, "record length plus horizon");
  const auto c = coefficients(model, horizon + 1);
  std::vector<std::pair<std::size_t, double>> taps;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != 0.0) taps.emplace_back(j, c[j]);
  }
  // z[k] holds Z_{k + 1 - J}.
  std::vector<double> z(horizon + length);
  const auto first = 1 - static_cast<std::int64_t>(horizon);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = stream(first + static_cast<std::int64_t>(k));

  std::vector<double> x(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    // X_{t+1} sits at z index t + J.
    double acc = 0.0;
    for (const auto& [j, cj] : taps) acc += cj * z[t + horizon - j];
    x[t] = acc;
  }
  return x;
}

/// Uses the process's horizon, or the tail horizon when unset.
inline std::vector<double> simulate_record(const ProcessSpec& spec, std::size_t length) {
  const std::size_t horizon = spec.horizon.value_or(tail_horizon(spec.model).horizon);
  return simulate_record(spec.model, spec.innovations.stream(), length, horizon);
}

}  // namespace lpmat
