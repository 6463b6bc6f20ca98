// Copyright 2026 The wflab Authors
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
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wflab {

using cplx = std::complex<double>;

/// Raised when a caller breaks a documented precondition: dimension
/// mismatches, non-Hermitian input to a Hermitian-only routine, states that
/// fail normalization, and the like.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace tol {
/// Normalization and completeness checks (unit norm, POVM sums to identity).
inline constexpr double kNorm = 1e-12;
/// Hermiticity checks.
inline constexpr double kHerm = 1e-12;
/// Positive semidefiniteness: eigenvalues may dip this far below zero.
inline constexpr double kPsd = 1e-9;
/// Sharpness (projectivity) of a POVM effect.
inline constexpr double kSharp = 1e-10;
/// Operator-norm threshold for the exact commutation criterion.
inline constexpr double kCommute = 1e-10;
}  // namespace tol

/// Column vector of complex amplitudes.
struct Ket {
  std::vector<cplx> amp;

  Ket() = default;
  explicit Ket(std::size_t dim) : amp(dim) {}
  Ket(std::initializer_list<cplx> values) : amp(values) {}

  std::size_t dim() const { return amp.size(); }
  cplx& operator[](std::size_t i) { return amp[i]; }
  const cplx& operator[](std::size_t i) const { return amp[i]; }

  static Ket basis(std::size_t dim, std::size_t index) {
    Ket k(dim);
    k.amp.at(index) = 1.0;
    return k;
  }

  double norm() const {
    double s = 0;
    for (const auto& a : amp) s += std::norm(a);
    return std::sqrt(s);
  }
};

/// <x|y>, antilinear in the first argument.
inline cplx inner(const Ket& x, const Ket& y) {
  if (x.dim() != y.dim()) {
    throw ContractError("inner: dimension mismatch");
  }
  cplx s = 0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline Ket operator+(const Ket& x, const Ket& y) {
  if (x.dim() != y.dim()) {
    throw ContractError("ket sum: dimension mismatch");
  }
  Ket r(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline Ket operator-(const Ket& x, const Ket& y) {
  if (x.dim() != y.dim()) {
    throw ContractError("ket difference: dimension mismatch");
  }
  Ket r(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline Ket operator*(const cplx& c, const Ket& x) {
  Ket r(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) r[i] = c * x[i];
  return r;
}

/// Dense complex matrix, row-major.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  /// Builds from rows, e.g. Mat::from_rows({{1, 0}, {0, 1}}).
  static Mat from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    Mat m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != m.cols_) {
        throw ContractError("from_rows: ragged row lengths");
      }
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat zero(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// Side length; the matrix must be square.
  std::size_t dim() const {
    if (rows_ != cols_) {
      throw ContractError("dim: matrix is not square");
    }
    return rows_;
  }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

inline Mat operator+(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ContractError("matrix sum: dimension mismatch");
  }
  Mat r(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) + y(i, j);
  return r;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ContractError("matrix difference: dimension mismatch");
  }
  Mat r(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) - y(i, j);
  return r;
}

inline Mat operator*(const cplx& c, const Mat& x) {
  Mat r(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = c * x(i, j);
  return r;
}

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols() != y.rows()) {
    throw ContractError("matrix product: dimension mismatch");
  }
  Mat r(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const cplx xik = x(i, k);
      if (xik == cplx{}) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) += xik * y(k, j);
    }
  }
  return r;
}

inline Ket operator*(const Mat& m, const Ket& x) {
  if (m.cols() != x.dim()) {
    throw ContractError("matrix-vector product: dimension mismatch");
  }
  Ket r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cplx s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

/// Conjugate transpose.
inline Mat dagger(const Mat& m) {
  Mat r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

inline cplx trace(const Mat& m) {
  cplx s = 0;
  for (std::size_t i = 0; i < m.dim(); ++i) s += m(i, i);
  return s;
}

/// [A, B] = AB - BA.
inline Mat commutator(const Mat& a, const Mat& b) {
  if (a.dim() != b.dim()) {
    throw ContractError("commutator: dimension mismatch");
  }
  return a * b - b * a;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

inline Ket kron(const Ket& x, const Ket& y) {
  Ket r(x.dim() * y.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < y.dim(); ++j) r[i * y.dim() + j] = x[i] * y[j];
  return r;
}

/// |x><y|.
inline Mat outer(const Ket& x, const Ket& y) {
  Mat r(x.dim(), y.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < y.dim(); ++j) r(i, j) = x[i] * std::conj(y[j]);
  return r;
}

/// |x><x|.
inline Mat projector(const Ket& x) { return outer(x, x); }

/// Largest entry magnitude.
inline double max_abs(const Mat& m) {
  double v = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v = std::max(v, std::abs(m(i, j)));
  return v;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return max_abs(a - b); }

inline double frobenius_norm(const Mat& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

inline bool is_hermitian(const Mat& m, double eps = tol::kHerm) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > eps) return false;
  return true;
}

/// Eigendecomposition of a Hermitian matrix. values are ascending and column
/// k of vectors is the unit eigenvector paired with values[k].
struct EigSystem {
  std::vector<double> values;
  Mat vectors;
};

namespace detail {

inline double off_diagonal_norm(const Mat& a) {
  double s = 0;
  for (std::size_t p = 0; p < a.dim(); ++p)
    for (std::size_t q = 0; q < a.dim(); ++q)
      if (p != q) s += std::norm(a(p, q));
  return std::sqrt(s);
}

/// Cyclic Jacobi rotations, run until the off-diagonal norm is <= 1e-14.
inline EigSystem jacobi_eigensystem(Mat a) {
  const std::size_t n = a.dim();
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-14) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx beta = a(p, q);
        const double ab = std::abs(beta);
        if (ab < 1e-300) continue;
        const cplx phase = beta / ab;
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const double tau = (alpha - gamma) / (2 * ab);
        const double t = tau >= 0 ? 1.0 / (tau + std::sqrt(1 + tau * tau))
                                  : -1.0 / (-tau + std::sqrt(1 + tau * tau));
        const double c = 1.0 / std::sqrt(1 + t * t);
        const cplx s = (t * c) * std::conj(phase);
        // A <- J' A J and V <- V J for the unitary J that is the identity
        // outside rows/cols (p, q) and [[c, -conj(s)], [s, c]] inside.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + s * akq;
          a(k, q) = -std::conj(s) * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(s) * aqk;
          a(q, k) = -s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + s * vkq;
          v(k, q) = -std::conj(s) * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  EigSystem out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace detail

inline EigSystem hermitian_eigensystem(const Mat& m) {
  if (!is_hermitian(m)) {
    throw ContractError("hermitian_eigensystem: input is not Hermitian");
  }
  const std::size_t n = m.dim();
  if (n == 1) {
    EigSystem out;
    out.values = {m(0, 0).real()};
    out.vectors = Mat::identity(1);
    return out;
  }
  if (n == 2) {
    // Closed form: lambda = tr/2 -+ sqrt((tr/2)^2 - det).
    const double a11 = m(0, 0).real();
    const double a22 = m(1, 1).real();
    const cplx a12 = m(0, 1);
    const double mean = (a11 + a22) / 2;
    const double det = a11 * a22 - std::norm(a12);
    const double disc = std::sqrt(std::max(0.0, mean * mean - det));
    EigSystem out;
    out.values = {mean - disc, mean + disc};
    out.vectors = Mat(2, 2);
    if (std::abs(a12) < 1e-300) {
      // Already diagonal; order the basis vectors by eigenvalue.
      const bool swap = a11 > a22;
      out.vectors(0, swap ? 1 : 0) = 1.0;
      out.vectors(1, swap ? 0 : 1) = 1.0;
    } else {
      // (a12, lambda_max - a11) is an eigenvector for the larger eigenvalue
      // and is nonzero whenever a12 is.
      const cplx x = a12;
      const cplx y = cplx(out.values[1] - a11, 0.0);
      const double nrm = std::sqrt(std::norm(x) + std::norm(y));
      out.vectors(0, 1) = x / nrm;
      out.vectors(1, 1) = y / nrm;
      out.vectors(0, 0) = -std::conj(y) / nrm;
      out.vectors(1, 0) = std::conj(x) / nrm;
    }
    return out;
  }
  return detail::jacobi_eigensystem(m);
}

inline double eig_min_hermitian(const Mat& m) {
  return hermitian_eigensystem(m).values.front();
}

inline double eig_max_hermitian(const Mat& m) {
  return hermitian_eigensystem(m).values.back();
}

/// Operator norm (largest singular value), valid for any matrix.
inline double op_norm(const Mat& m) {
  const Mat gram = dagger(m) * m;
  if (gram.dim() == 0) return 0;
  return std::sqrt(std::max(0.0, eig_max_hermitian(gram)));
}

inline bool is_psd(const Mat& m, double eps = tol::kPsd) {
  return is_hermitian(m) && eig_min_hermitian(m) >= -eps;
}

inline bool is_density(const Mat& m, double eps = tol::kPsd) {
  return m.rows() == m.cols() && is_hermitian(m) &&
         std::abs(trace(m) - cplx(1.0)) <= tol::kNorm &&
         eig_min_hermitian(m) >= -eps;
}

/// Nearest positive-semidefinite matrix in Frobenius distance: clips negative
/// eigenvalues to zero.
inline Mat psd_project(const Mat& m) {
  if (!is_hermitian(m, 1e-10)) {
    throw ContractError("psd_project: input is not Hermitian");
  }
  // Work on the Hermitian part so rounding drift in iterative callers cannot
  // trip the eigensolver's stricter check.
  const EigSystem eig = hermitian_eigensystem(cplx(0.5) * (m + dagger(m)));
  const std::size_t n = m.dim();
  Mat r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] <= 0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        r(i, j) += eig.values[k] * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
  }
  return r;
}

/// Column-isometric map V (V'V = 1). Wraps a rows >= cols matrix and checks
/// the isometry property on construction.
class Isometry {
 public:
  explicit Isometry(Mat m, double eps = tol::kNorm) : m_(std::move(m)) {
    if (m_.rows() < m_.cols()) {
      throw ContractError("Isometry: more columns than rows");
    }
    const Mat g = dagger(m_) * m_;
    if (max_abs_diff(g, Mat::identity(m_.cols())) > eps) {
      throw ContractError("Isometry: columns are not orthonormal");
    }
  }

  const Mat& mat() const { return m_; }
  std::size_t domain_dim() const { return m_.cols(); }
  std::size_t range_dim() const { return m_.rows(); }

  Ket apply(const Ket& x) const { return m_ * x; }

  /// rho -> V rho V'.
  Mat push(const Mat& rho) const { return m_ * rho * dagger(m_); }

  /// M -> V' M V (Heisenberg picture).
  Mat pull(const Mat& op) const { return dagger(m_) * op * m_; }

 private:
  Mat m_;
};

}  // namespace wflab
