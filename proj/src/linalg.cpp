#include "sgmres/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sgmres {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> cols, std::size_t rows) {
  Matrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> v) {
  if (v.size() != rows_) throw std::invalid_argument("Matrix::set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::column_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw std::out_of_range("Matrix::column_block");
  Matrix m(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so tiny Krylov components do not underflow.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : x) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("subtract: length mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

Vector scaled(double alpha, std::span<const double> x) {
  Vector z(x.begin(), x.end());
  for (double& v : z) v *= alpha;
  return z;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw std::invalid_argument("matvec_transposed: dimension mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(a(i, k), b.row(k), c.row(i));
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("subtract: dimension mismatch");
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

double orthonormality_error(const Matrix& a) {
  Matrix g = matmul(transpose(a), a);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

namespace {

void require_finite(const Matrix& a, const char* where) {
  if (!all_finite(a.data()))
    throw std::invalid_argument(std::string(where) + ": matrix has non-finite entries");
}

void rotate_pair(Vector& x, Vector& y, double cs, double sn) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = x[k];
    const double yk = y[k];
    x[k] = cs * xk - sn * yk;
    y[k] = sn * xk + cs * yk;
  }
}

// Hestenes one-sided Jacobi: rotate pairs of columns of g until they are
// mutually orthogonal to relative precision. The same rotations are applied
// to `acc` when given.
void hestenes_jacobi(std::vector<Vector>& g, std::vector<Vector>* acc) {
  const std::size_t ncol = g.size();
  if (ncol < 2) return;
  const std::size_t len = g.front().size();
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(len, 1));
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t j = 1; j < ncol; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const double a = dot(g[i], g[i]);
        const double b = dot(g[j], g[j]);
        const double c = dot(g[i], g[j]);
        if (a == 0.0 || b == 0.0 || c == 0.0) continue;
        if (std::abs(c) <= tol * std::sqrt(a) * std::sqrt(b)) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * c);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        rotate_pair(g[i], g[j], cs, sn);
        if (acc) rotate_pair((*acc)[i], (*acc)[j], cs, sn);
      }
    }
    if (!rotated) break;
  }
}

std::vector<std::size_t> descending_order(std::span<const double> s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });
  return idx;
}

// Fill the missing columns of an m x m orthogonal matrix with the standard
// basis vector that has the largest component outside the current span.
void complete_orthonormal(std::vector<Vector>& cols, std::vector<bool>& present) {
  const std::size_t m = cols.size();
  for (std::size_t slot = 0; slot < m; ++slot) {
    if (present[slot]) continue;
    Vector best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      Vector w(m, 0.0);
      w[k] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t s = 0; s < m; ++s)
          if (present[s]) axpy(-dot(cols[s], w), cols[s], w);
      const double nw = norm2(w);
      if (nw > best_norm + 1e-12) {
        best_norm = nw;
        best = std::move(w);
      }
    }
    for (double& v : best) v /= best_norm;
    cols[slot] = std::move(best);
    present[slot] = true;
  }
}

void normalize_sign(Vector& u, Vector* v) {
  for (double x : u) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (double& y : u) y = -y;
        if (v)
          for (double& y : *v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  require_finite(a, "svd");
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const std::size_t p = std::min(n, m);

  // Columns of A^T are the rows of A. After orthogonalization A^T J = G with
  // orthogonal columns, so A = J diag(|g_i|) (g_i / |g_i|)^T.
  std::vector<Vector> g(n);
  std::vector<Vector> acc(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    g[i].assign(a.row(i).begin(), a.row(i).end());
    acc[i][i] = 1.0;
  }
  hestenes_jacobi(g, &acc);

  Vector norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = norm2(g[i]);
  const auto order = descending_order(norms);

  SvdFactors f;
  f.sigma.resize(p);
  const double sigma_max = n > 0 ? norms[order[0]] : 0.0;
  const double cutoff = sigma_max * 1e-13;

  std::vector<Vector> ucols(n);
  std::vector<Vector> vcols(m);
  std::vector<bool> vpresent(m, false);
  for (std::size_t k = 0; k < n; ++k) {
    ucols[k] = acc[order[k]];
    if (k < p) {
      f.sigma[k] = norms[order[k]];
      if (f.sigma[k] > cutoff && f.sigma[k] > 0.0) {
        vcols[k] = scaled(1.0 / f.sigma[k], g[order[k]]);
        vpresent[k] = true;
      }
    }
  }
  complete_orthonormal(vcols, vpresent);
  for (std::size_t k = 0; k < n; ++k) normalize_sign(ucols[k], k < p ? &vcols[k] : nullptr);

  f.u = Matrix::from_columns(ucols, n);
  f.v = Matrix::from_columns(vcols, m);
  return f;
}

Vector singular_values(const Matrix& a) {
  require_finite(a, "singular_values");
  const bool by_columns = a.cols() <= a.rows();
  std::vector<Vector> g;
  if (by_columns) {
    for (std::size_t j = 0; j < a.cols(); ++j) g.push_back(a.column(j));
  } else {
    for (std::size_t i = 0; i < a.rows(); ++i) g.emplace_back(a.row(i).begin(), a.row(i).end());
  }
  hestenes_jacobi(g, nullptr);
  Vector s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = norm2(g[i]);
  std::sort(s.begin(), s.end(), std::greater<>());
  s.resize(std::min(a.rows(), a.cols()));
  return s;
}

std::size_t numerical_rank(std::span<const double> sigma, double tol_rank) {
  if (!(tol_rank > 0.0)) throw std::invalid_argument("numerical_rank: tol_rank must be positive");
  if (sigma.empty() || sigma[0] == 0.0) return 0;
  const double threshold = tol_rank * sigma[0];
  return static_cast<std::size_t>(
      std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > threshold; }));
}

std::size_t numerical_rank(const SvdFactors& f, double tol_rank) {
  return numerical_rank(f.sigma, tol_rank);
}

Vector min_norm_lstsq(const Matrix& a, const SvdFactors& f, std::span<const double> b,
                      double tol_rank) {
  if (b.size() != a.rows()) throw std::invalid_argument("min_norm_lstsq: dimension mismatch");
  const std::size_t r = numerical_rank(f, tol_rank);
  Vector x(a.cols(), 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    double ub = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) ub += f.u(i, k) * b[i];
    const double coef = ub / f.sigma[k];
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] += coef * f.v(i, k);
  }
  return x;
}

Vector min_norm_lstsq(const Matrix& a, std::span<const double> b, double tol_rank) {
  return min_norm_lstsq(a, svd(a), b, tol_rank);
}

QrFactors householder_qr(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows < cols) throw std::invalid_argument("householder_qr: requires rows >= cols");
  require_finite(m, "householder_qr");

  Matrix r = m;
  std::vector<Vector> reflectors(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    Vector v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = r(i, k);
    const double nx = norm2(v);
    if (nx == 0.0) continue;
    v[0] += std::copysign(nx, v[0]);
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    for (std::size_t j = k; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < rows; ++i) s += v[i - k] * r(i, j);
      for (std::size_t i = k; i < rows; ++i) r(i, j) -= 2.0 * s * v[i - k];
    }
    reflectors[k] = std::move(v);
  }

  Matrix q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) q(j, j) = 1.0;
  for (std::size_t kk = cols; kk-- > 0;) {
    const Vector& v = reflectors[kk];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < rows; ++i) s += v[i - kk] * q(i, j);
      for (std::size_t i = kk; i < rows; ++i) q(i, j) -= 2.0 * s * v[i - kk];
    }
  }

  QrFactors f{std::move(q), Matrix(cols, cols)};
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = i; j < cols; ++j) f.r(i, j) = r(i, j);
  for (std::size_t k = 0; k < cols; ++k) {
    if (f.r(k, k) < 0.0) {
      for (std::size_t j = k; j < cols; ++j) f.r(k, j) = -f.r(k, j);
      for (std::size_t i = 0; i < rows; ++i) f.q(i, k) = -f.q(i, k);
    }
  }
  return f;
}

}  // namespace sgmres
