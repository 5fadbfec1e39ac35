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

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lpmat/error.hpp"
#include "lpmat/matrix.hpp"

namespace lpmat {

/// Sorted eigenvalues of a symmetric matrix; the ESD is the uniform
/// probability measure on them.
class EmpiricalSpectrum {
 public:
  EmpiricalSpectrum() = default;

  /// Sorts `values`; `rows` x `cols` records the shape of the matrix the
  /// spectrum came from (the data matrix for Gram spectra).
  explicit EmpiricalSpectrum(std::vector<double> values, std::size_t rows = 0,
                             std::size_t cols = 0)
      : values_(std::move(values)), rows_(rows), cols_(cols) {
    if (values_.empty()) throw ValidationError("empirical spectrum needs at least one value");
    std::ranges::sort(values_);
    if (rows_ == 0) rows_ = cols_ = values_.size();
  }

  std::span<const double> eigenvalues() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t source_rows() const noexcept { return rows_; }
  std::size_t source_cols() const noexcept { return cols_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  double sum() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

 private:
  std::vector<double> values_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

namespace detail {

/// Householder reduction of the symmetric matrix `a` (overwritten) to
/// tridiagonal form: diagonal `d`, subdiagonal `e` (e[i] couples i, i+1).
inline void tridiagonalize(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  std::vector<double> v(n), p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // trailing block size
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale += std::abs(a(k + 1 + i, k));
    d[k] = a(k, k);
    if (scale == 0.0) {
      e[k] = 0.0;
      continue;
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a(k + 1 + i, k) / scale;
      norm2 += v[i] * v[i];
    }
    const double norm = std::sqrt(norm2);
    const double alpha = v[0] > 0.0 ? -norm : norm;
    e[k] = alpha * scale;
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) vnorm2 += v[i] * v[i];
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t i = 0; i < m; ++i) v[i] *= inv;

    // p = A22 v, w = 2p - 2 (v^T p) v, A22 <- A22 - v w^T - w v^T.
    double vp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = a.row(k + 1 + i).subspan(k + 1, m);
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += row[j] * v[j];
      p[i] = acc;
      vp += v[i] * acc;
    }
    for (std::size_t i = 0; i < m; ++i) w[i] = 2.0 * (p[i] - vp * v[i]);
    for (std::size_t i = 0; i < m; ++i) {
      auto row = a.row(k + 1 + i).subspan(k + 1, m);
      const double vi = v[i];
      const double wi = w[i];
      for (std::size_t j = 0; j < m; ++j) row[j] -= vi * w[j] + wi * v[j];
    }
  }
  if (n >= 2) {
    d[n - 2] = a(n - 2, n - 2);
    e[n - 2] = a(n - 1, n - 2);
  }
  d[n - 1] = a(n - 1, n - 1);
  e[n - 1] = 0.0;
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. Eigenvalues end up in
/// `d` (unsorted). Throws NonConvergenceError past 30 * n total iterations.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  const std::size_t budget = 30 * n;
  std::size_t spent = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++spent > budget) {
        throw NonConvergenceError("symmetric eigensolver did not converge at index " +
                                      std::to_string(l),
                                  std::abs(e[l]));
      }
      // Wilkinson-type shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double shift = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= shift;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - shift;
        r = (d[i] - g) * s + 2.0 * c * b;
        shift = s * r;
        d[i + 1] = g + shift;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= shift;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace detail

/// All eigenvalues of a symmetric matrix, ascending. Householder
/// tridiagonalization followed by implicit-shift QL; no eigenvectors.
inline EmpiricalSpectrum sym_eigenvalues(const DenseMatrix& m, std::size_t source_rows = 0,
                                         std::size_t source_cols = 0) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) throw ValidationError("eigenvalues need a non-empty square matrix");
  double scale = 0.0;
  for (double v : m.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale) {
        throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
  DenseMatrix work = m;
  std::vector<double> d, e;
  detail::tridiagonalize(work, d, e);
  detail::tridiagonal_ql(d, e);
  return EmpiricalSpectrum(std::move(d), source_rows ? source_rows : n,
                           source_cols ? source_cols : n);
}

/// #{lambda_i <= x} / p.
inline double esd_cdf(const EmpiricalSpectrum& spec, double x) {
  const auto ev = spec.eigenvalues();
  const auto count = std::ranges::upper_bound(ev, x) - ev.begin();
  return static_cast<double>(count) / static_cast<double>(ev.size());
}

/// (1/p) sum_i 1 / (lambda_i - z), Im z > 0.
inline std::complex<double> empirical_stieltjes(const EmpiricalSpectrum& spec,
                                                std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw ValidationError("Stieltjes transform needs Im z > 0", "z");
  std::complex<double> acc = 0.0;
  for (double lambda : spec.eigenvalues()) acc += 1.0 / (lambda - z);
  return acc / static_cast<double>(spec.size());
}

/// Pool several spectra into one ESD (each eigenvalue weighted equally).
inline EmpiricalSpectrum pool(std::span<const EmpiricalSpectrum> spectra) {
  std::vector<double> all;
  for (const auto& s : spectra) all.insert(all.end(), s.eigenvalues().begin(), s.eigenvalues().end());
  if (all.empty()) throw ValidationError("nothing to pool");
  return EmpiricalSpectrum(std::move(all), spectra.front().source_rows(),
                           spectra.front().source_cols());
}

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double mass = 0.0;
};

/// Equal-width bins over [min, max]; masses sum to one.
inline std::vector<HistogramBin> histogram(const EmpiricalSpectrum& spec, std::size_t bins) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin", "bins");
  const double lo = spec.min();
  double hi = spec.max();
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * static_cast<double>(b);
    out[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  const double w = 1.0 / static_cast<double>(spec.size());
  for (double v : spec.eigenvalues()) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    out[std::min(b, bins - 1)].mass += w;
  }
  return out;
}

/// Header "lambda", one eigenvalue per line.
inline void write_spectrum_csv(std::ostream& os, const EmpiricalSpectrum& spec) {
  const auto old = os.precision(17);
  os << "lambda\n";
  for (double v : spec.eigenvalues()) os << v << '\n';
  os.precision(old);
}

/// Header "bin_left,bin_right,mass".
inline void write_histogram_csv(std::ostream& os, std::span<const HistogramBin> bins) {
  const auto old = os.precision(17);
  os << "bin_left,bin_right,mass\n";
  for (const auto& b : bins) os << b.left << ',' << b.right << ',' << b.mass << '\n';
  os.precision(old);
}

}  // namespace lpmat
