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

// Structured matrices of the linear-process model: the data matrix X whose
// rows are consecutive segments of one record, its truncated version, the
// innovation matrix Z, the circulant-derived Omega, the Toeplitz
// autocovariance matrix and the normalized Gram matrix p^{-1} M M^T.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lpmat/error.hpp"
#include "lpmat/process.hpp"

namespace lpmat {

struct MatrixShape {
  std::size_t p = 1;  ///< rows
  std::size_t n = 1;  ///< columns

  double y() const noexcept { return static_cast<double>(p) / static_cast<double>(n); }

  void validate() const {
    if (p == 0 || n == 0) throw ValidationError("matrix dimensions must be positive", "p");
    checked_product(p, n, "p * n");
  }
};

/// Dense row-major real matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(checked_product(rows, cols, "matrix size"), fill) {}

  static DenseMatrix identity(std::size_t m) {
    DenseMatrix out(m, m);
    for (std::size_t i = 0; i < m; ++i) out(i, i) = 1.0;
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return data_; }

  DenseMatrix transpose() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  double trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix product dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

inline DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("matrix sum dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += b(i, j);
  return a;
}

inline double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("matrix comparison dimension mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k)
    d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

/// One row per line, comma separated, full round-trip precision.
inline void write_csv(std::ostream& os, const DenseMatrix& m) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

/// X_{i,t} = X_{(i-1)n + t}: row i holds record segment (i-1)n+1 .. in.
inline DenseMatrix build_X(std::span<const double> record, const MatrixShape& shape) {
  shape.validate();
  if (record.size() != shape.p * shape.n) {
    throw ValidationError("record length " + std::to_string(record.size()) + " != p * n = " +
                          std::to_string(shape.p * shape.n));
  }
  DenseMatrix x(shape.p, shape.n);
  for (std::size_t i = 0; i < shape.p; ++i)
    std::copy_n(record.begin() + static_cast<std::ptrdiff_t>(i * shape.n), shape.n,
                x.row(i).begin());
  return x;
}

/// Data matrix from the process's innovation stream at the resolved horizon.
inline DenseMatrix build_X(const ProcessSpec& spec, const MatrixShape& shape) {
  shape.validate();
  return build_X(simulate_record(spec.model, spec.innovations.stream(), shape.p * shape.n,
                                 resolve_horizon(spec, shape.n)),
                 shape);
}

/// Same as build_X but with the process truncated at lag n (inclusive).
inline DenseMatrix build_truncated_X(const ProcessSpec& spec, const MatrixShape& shape) {
  shape.validate();
  return build_X(simulate_record(spec.model, spec.innovations.stream(), shape.p * shape.n,
                                 shape.n),
                 shape);
}

/// (p+1) x n matrix Z_{i,t} = Z_{(i-2)n + t}; the first row holds the
/// innovations with indices 1-n .. 0.
inline DenseMatrix build_Z(const InnovationStream& stream, const MatrixShape& shape) {
  shape.validate();
  DenseMatrix z(shape.p + 1, shape.n);
  const auto n = static_cast<std::int64_t>(shape.n);
  for (std::size_t r = 0; r <= shape.p; ++r)
    for (std::size_t c = 0; c < shape.n; ++c)
      z(r, c) = stream((static_cast<std::int64_t>(r) - 1) * n + static_cast<std::int64_t>(c) + 1);
  return z;
}

inline DenseMatrix build_Z(const ProcessSpec& spec, const MatrixShape& shape) {
  return build_Z(spec.innovations.stream(), shape);
}

namespace detail {
inline double coeff_or_zero(std::span<const double> c, std::size_t k) {
  return k < c.size() ? c[k] : 0.0;
}
}  // namespace detail

/// m x m circulant C_{ij} = c_{(m-1+j-i) mod m} (1-based). Its last row is
/// (c_0, ..., c_{m-1}); deleting it leaves build_Omega(c, m - 1).
inline DenseMatrix build_circulant(std::span<const double> c, std::size_t m) {
  if (m == 0) throw ValidationError("circulant size must be positive", "m");
  DenseMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out(i, j) = detail::coeff_or_zero(c, (m - 1 + j + m - i) % m);
  return out;
}

/// n x (n+1) matrix Omega_{ij} = c_{(n+j-i) mod (n+1)}, i = 1..n, j = 1..n+1.
inline DenseMatrix build_Omega(std::span<const double> c, std::size_t n) {
  if (n == 0) throw ValidationError("Omega needs n >= 1", "n");
  DenseMatrix out(n, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      out(i, j) = detail::coeff_or_zero(c, (n + j + (n + 1) - i) % (n + 1));
  return out;
}

/// Symmetric Toeplitz Gamma_{ij} = gamma(|i-j|).
inline DenseMatrix build_toeplitz_gamma(std::span<const double> c, std::size_t m) {
  if (m == 0) throw ValidationError("Toeplitz size must be positive", "m");
  std::vector<double> gamma(m);
  for (std::size_t h = 0; h < m; ++h) gamma[h] = autocovariance(c, static_cast<std::int64_t>(h));
  DenseMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = gamma[i > j ? i - j : j - i];
  return out;
}

/// p^{-1} M M^T, with p the row count of M. Exactly symmetric.
inline DenseMatrix gram(const DenseMatrix& m) {
  const std::size_t p = m.rows();
  if (p == 0) throw ValidationError("gram of an empty matrix");
  const double scale = 1.0 / static_cast<double>(p);
  DenseMatrix out(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto ri = m.row(i);
    for (std::size_t j = i; j < p; ++j) {
      const auto rj = m.row(j);
      double acc = 0.0;
      for (std::size_t t = 0; t < ri.size(); ++t) acc += ri[t] * rj[t];
      out(i, j) = out(j, i) = acc * scale;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shift-operator representation of the truncated matrix

/// K_m with ones on the subdiagonal, and the coefficient polynomials
/// chi(z) = c_0 + ... + c_m z^m and chi_bar(z) = z^m chi(1/z).
struct ShiftPolynomialPair {
  DenseMatrix shift;
  std::vector<double> chi;
  std::vector<double> chi_bar;

  static ShiftPolynomialPair make(std::span<const double> c, std::size_t m) {
    ShiftPolynomialPair out{DenseMatrix(m, m), std::vector<double>(m + 1), {}};
    for (std::size_t i = 1; i < m; ++i) out.shift(i, i - 1) = 1.0;
    for (std::size_t k = 0; k <= m; ++k) out.chi[k] = detail::coeff_or_zero(c, k);
    out.chi_bar.assign(out.chi.rbegin(), out.chi.rend());
    return out;
  }
};

/// sum_k a_k M^k by Horner's rule.
inline DenseMatrix evaluate_polynomial(std::span<const double> a, const DenseMatrix& m) {
  const std::size_t size = m.rows();
  DenseMatrix acc(size, size);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    acc = acc * m;
    for (std::size_t i = 0; i < size; ++i) acc(i, i) += *it;
  }
  return acc;
}

struct ShiftCheck {
  bool exact = false;
  double max_deviation = 0.0;
};

/// Builds [0 I_p I_p 0] diag(Z, Z) [chi_n(K_n^T); chi_bar_n(K_n)] literally and
/// compares it with build_truncated_X. Test oracle for small shapes only.
inline ShiftCheck shift_representation_check(const ProcessSpec& spec, const MatrixShape& shape,
                                             double tol = 1e-12) {
  shape.validate();
  if (shape.p * shape.n > 10000)
    throw ValidationError("shift_representation_check is limited to p * n <= 10^4");
  const std::size_t p = shape.p;
  const std::size_t n = shape.n;
  const auto c = coefficients(spec.model, n + 1);
  const auto pair = ShiftPolynomialPair::make(c, n);
  const DenseMatrix z = build_Z(spec, shape);

  DenseMatrix selector(p, 2 * (p + 1));
  for (std::size_t i = 0; i < p; ++i) {
    selector(i, 1 + i) = 1.0;
    selector(i, (p + 1) + i) = 1.0;
  }
  DenseMatrix block(2 * (p + 1), 2 * n);
  for (std::size_t r = 0; r <= p; ++r)
    for (std::size_t t = 0; t < n; ++t) {
      block(r, t) = z(r, t);
      block(p + 1 + r, n + t) = z(r, t);
    }
  const DenseMatrix upper = evaluate_polynomial(pair.chi, pair.shift.transpose());
  const DenseMatrix lower = evaluate_polynomial(pair.chi_bar, pair.shift);
  DenseMatrix stacked(2 * n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      stacked(i, j) = upper(i, j);
      stacked(n + i, j) = lower(i, j);
    }
  const DenseMatrix represented = selector * block * stacked;
  const double dev = max_abs_difference(represented, build_truncated_X(spec, shape));
  return {dev <= tol, dev};
}

}  // namespace lpmat
