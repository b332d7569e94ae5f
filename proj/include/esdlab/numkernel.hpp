// Copyright 2026 The esdlab Authors
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

// Dense complex linear algebra sized for one- and two-qubit objects.
//
// Basis convention (global): qubit A is the slow (left Kronecker) index, so
// a two-qubit index is 2*a + b and the ordering is |HH>,|HV>,|VH>,|VV>.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "esdlab/error.hpp"

namespace esdlab {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) {
      throw Error(ErrorCode::DimensionMismatch, "matrix dimensions must be positive");
    }
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0 || data_.size() != rows * cols) {
      throw Error(ErrorCode::DimensionMismatch,
                  "entry count does not match " + std::to_string(rows) + "x" +
                      std::to_string(cols));
    }
    for (const auto& z : data_) {
      if (!is_finite(z)) throw Error(ErrorCode::NonFinite, "matrix entry is not finite");
    }
  }

  /// Row-major nested initializer, e.g. {{1, 0}, {0, 1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
      throw Error(ErrorCode::DimensionMismatch, "matrix dimensions must be positive");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
      for (const auto& z : row) {
        if (!is_finite(z)) throw Error(ErrorCode::NonFinite, "matrix entry is not finite");
        data_.push_back(z);
      }
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
  }

  /// Column vector from amplitudes.
  static ComplexMatrix column(std::span<const Complex> v) {
    return {v.size(), 1, std::vector<Complex>(v.begin(), v.end())};
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  ComplexMatrix conjugate() const {
    ComplexMatrix out = *this;
    for (auto& z : out.data_) z = std::conj(z);
    return out;
  }

  Complex trace() const {
    require_square("trace");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= s; }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(ErrorCode::DimensionMismatch, "product of " + a.shape() + " and " + b.shape());
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_square(const char* op) const {
    if (!is_square()) throw Error(ErrorCode::DimensionMismatch, std::string(op) + " of " + shape());
  }
  void require_same_shape(const ComplexMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorCode::DimensionMismatch,
                  shape() + " " + op + " " + o.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

namespace pauli {
inline ComplexMatrix I() { return ComplexMatrix::identity(2); }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

enum class Subsystem { First, Second };

namespace detail {
inline void require_two_qubit(const ComplexMatrix& m, const char* op) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw Error(ErrorCode::DimensionMismatch, std::string(op) + " needs 4x4, got " + m.shape());
  }
}
}  // namespace detail

/// Traces out `traced` and returns the 2x2 state of the other qubit.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem traced) {
  detail::require_two_qubit(m, "partial_trace");
  ComplexMatrix out(2, 2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t k = 0; k < 2; ++k) {
        out(x, y) += traced == Subsystem::Second ? m(2 * x + k, 2 * y + k)
                                                 : m(2 * k + x, 2 * k + y);
      }
  return out;
}

inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem target) {
  detail::require_two_qubit(m, "partial_transpose");
  ComplexMatrix out(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t d = 0; d < 2; ++d) {
          // entry <a b| m |c d>
          const Complex v = m(2 * a + b, 2 * c + d);
          if (target == Subsystem::Second) {
            out(2 * a + d, 2 * c + b) = v;
          } else {
            out(2 * c + b, 2 * a + d) = v;
          }
        }
  return out;
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  return frobenius_distance(m, m.adjoint());
}

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns are orthonormal eigenvectors

  ComplexMatrix vector(std::size_t k) const {
    ComplexMatrix v(vectors.rows(), 1);
    for (std::size_t i = 0; i < vectors.rows(); ++i) v(i, 0) = vectors(i, k);
    return v;
  }
};

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kJacobiOffDiagTol = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver for Hermitian input.
///
/// Input within `tol` of Hermitian (Frobenius) is symmetrized first. Pairs are
/// swept in row-major upper-triangle order until the off-diagonal Frobenius
/// norm falls below 1e-13 (scaled by the norm when that exceeds one).
/// Eigenvectors are phase-normalized so their largest-magnitude component
/// (first one on ties) is real and positive; columns are ordered by
/// descending eigenvalue, stable on exact ties.
inline EigenDecomposition herm_eig(const ComplexMatrix& m, double tol = kHermitianTol) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "herm_eig of " + m.shape());
  if (hermiticity_defect(m) > tol) {
    throw Error(ErrorCode::NotHermitian,
                "defect " + std::to_string(hermiticity_defect(m)) + " exceeds tolerance");
  }
  const std::size_t n = m.rows();
  ComplexMatrix a = (m + m.adjoint()) * 0.5;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.frobenius_norm());
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweeps = 0;
  while (off_norm() >= kJacobiOffDiagTol * scale) {
    if (++sweeps > kJacobiMaxSweeps) {
      throw Error(ErrorCode::NoConvergence, "Jacobi exceeded the sweep budget");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Complex phase = apq / r;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const Complex gpp = c;
        const Complex gpq = s;
        const Complex gqp = -s * std::conj(phase);
        const Complex gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(v(i, k)));
    std::size_t pivot = 0;
    while (std::abs(v(pivot, k)) < best - 1e-12) ++pivot;
    const Complex z = v(pivot, k);
    const Complex unphase = std::conj(z) / std::abs(z);
    for (std::size_t i = 0; i < n; ++i) v(i, k) *= unphase;
    v(pivot, k) = std::abs(v(pivot, k));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Rebuilds V * diag(f(values)) * V^dagger.
template <class F>
ComplexMatrix spectral_map(const EigenDecomposition& eig, F&& f) {
  const std::size_t n = eig.values.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += fk * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
  }
  return out;
}

/// Eigenvalues this far below the spectral radius are numerically zero.
inline constexpr double kSpectralFloor = 1e-14;

/// Hermitian PSD square root. Eigenvalues in [-tol, 0) are clamped to zero;
/// anything more negative is NotPSD.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = kHermitianTol) {
  const auto eig = herm_eig(m, tol);
  const double radius = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  for (double x : eig.values) {
    if (x < -tol) {
      throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(x) + " below -tol");
    }
  }
  const double floor = kSpectralFloor * std::max(1.0, radius);
  return spectral_map(eig, [&](double x) { return x <= floor ? 0.0 : std::sqrt(x); });
}

/// Solves the dense real system A x = b (A is n x n, row-major) by Gaussian
/// elimination with partial pivoting. Returns nullopt when a pivot falls
/// below `rank_tol` times the largest absolute entry of A.
inline std::optional<std::vector<double>> solve_linear(std::vector<double> a,
                                                       std::vector<double> b,
                                                       double rank_tol = 1e-12) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw Error(ErrorCode::DimensionMismatch, "solve_linear shapes");
  double amax = 0.0;
  for (double x : a) amax = std::max(amax, std::abs(x));
  if (amax == 0.0) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < rank_tol * amax) return std::nullopt;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace esdlab
