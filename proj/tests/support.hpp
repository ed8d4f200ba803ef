#pragma once

// Reference computations used as oracles by the tests. They are written
// independently of the library kernels they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sgmres/linalg.hpp"

namespace testing {

using sgmres::Matrix;
using sgmres::Vector;

inline Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = nd(eng);
  return m;
}

inline Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (double& x : v) x = nd(eng);
  return v;
}

inline double ref_norm(const Vector& v) {
  long double s = 0;
  for (double x : v) s += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(s));
}

inline Vector ref_matvec(const Matrix& a, const Vector& x) {
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += static_cast<long double>(a(i, j)) * x[j];
    y[i] = static_cast<double>(s);
  }
  return y;
}

inline Matrix ref_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(s);
    }
  return c;
}

inline Matrix ref_transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double ref_fro(const Matrix& a) {
  long double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += static_cast<long double>(a(i, j)) * a(i, j);
  return static_cast<double>(std::sqrt(s));
}

inline double ref_fro_diff(const Matrix& a, const Matrix& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const long double d = static_cast<long double>(a(i, j)) - b(i, j);
      s += d * d;
    }
  return static_cast<double>(std::sqrt(s));
}

inline double ref_orth_error(const Matrix& q) {
  Matrix g = ref_matmul(ref_transpose(q), q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return ref_fro(g);
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi, descending.
inline Vector ref_sym_eigenvalues(Matrix s) {
  const std::size_t n = s.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(s(p, q)) < 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = s(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Singular values through the eigenvalues of A^T A (accurate for the large ones).
inline Vector ref_singular_values(const Matrix& a) {
  Vector ev = ref_sym_eigenvalues(ref_matmul(ref_transpose(a), a));
  for (double& x : ev) x = std::sqrt(std::max(0.0, x));
  ev.resize(std::min(a.rows(), a.cols()));
  return ev;
}

/// Random orthogonal matrix by classical Gram-Schmidt on Gaussian columns, twice.
inline Matrix ref_orthogonal(std::size_t n, std::uint64_t seed) {
  Matrix g = gaussian(n, n, seed);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double d = 0;
        for (std::size_t i = 0; i < n; ++i) d += g(i, k) * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) -= d * g(i, k);
      }
    double nn = 0;
    for (std::size_t i = 0; i < n; ++i) nn += g(i, j) * g(i, j);
    nn = std::sqrt(nn);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= nn;
  }
  return g;
}

}  // namespace testing
