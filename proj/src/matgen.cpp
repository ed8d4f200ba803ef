#include "sgmres/matgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgmres {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double s = *spare_;
    spare_.reset();
    return s;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  return radius * std::cos(theta);
}

Vector Rng::normal_vector(std::size_t n) {
  Vector v(n);
  for (double& x : v) x = normal();
  return v;
}

Matrix Rng::normal_matrix(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = normal();
  return m;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void GenSpec::validate() const {
  if (n == 0) throw std::invalid_argument("GenSpec: n must be at least 1");
  if (r < 1 || r > n) throw std::invalid_argument("GenSpec: rank must satisfy 1 <= r <= n");
  if (!(a12_scale >= 0.0) || !std::isfinite(a12_scale))
    throw std::invalid_argument("GenSpec: a12_scale must be finite and nonnegative");
  if (!(cond_cap >= 1.0) || !std::isfinite(cond_cap))
    throw std::invalid_argument("GenSpec: cond_cap must be finite and >= 1");
}

Matrix random_orthogonal(std::size_t n, Rng& rng) { return householder_qr(rng.normal_matrix(n, n)).q; }

Matrix random_conditioned(std::size_t r, double cond_cap, Rng& rng) {
  const Matrix u = random_orthogonal(r, rng);
  const Matrix w = random_orthogonal(r, rng);
  Vector s(r);
  for (std::size_t i = 0; i < r; ++i) s[i] = i == 0 ? 1.0 : std::pow(cond_cap, -rng.uniform());
  Matrix us = u;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) us(i, j) *= s[j];
  return matmul(us, transpose(w));
}

Matrix assemble_block_matrix(const Matrix& q, const Matrix& a11, const Matrix& a12) {
  const std::size_t n = q.rows();
  const std::size_t r = a11.rows();
  if (q.cols() != n || a11.cols() != r || a12.rows() != r || a12.cols() != n - r)
    throw std::invalid_argument("assemble_block_matrix: dimension mismatch");
  Matrix t(n, n);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) t(i, j) = a11(i, j);
    for (std::size_t j = 0; j < n - r; ++j) t(i, r + j) = a12(i, j);
  }
  return matmul(matmul(q, t), transpose(q));
}

GeneratedMatrix generate_singular(const GenSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GeneratedMatrix g;
  g.q = random_orthogonal(spec.n, rng);
  g.a11 = random_conditioned(spec.r, spec.cond_cap, rng);
  g.a12 = rng.normal_matrix(spec.r, spec.n - spec.r);
  const double n12 = frobenius_norm(g.a12);
  const double factor = n12 > 0.0 ? spec.a12_scale * frobenius_norm(g.a11) / n12 : 0.0;
  for (double& x : g.a12.data()) x *= factor;
  g.a = assemble_block_matrix(g.q, g.a11, g.a12);
  return g;
}

Matrix gen_range_symmetric(const GenSpec& spec) {
  GenSpec s = spec;
  s.a12_scale = 0.0;
  return generate_singular(s).a;
}

Matrix gen_general_singular(const GenSpec& spec) { return generate_singular(spec).a; }

Matrix shift_nilpotent(std::size_t n) {
  if (n < 2) throw std::invalid_argument("shift_nilpotent: n must be at least 2");
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return a;
}

Vector gen_rhs(const Matrix& a, const RangeBasis& basis, bool consistent, std::uint64_t seed) {
  const std::size_t n = a.rows();
  if (basis.n() != n) throw std::invalid_argument("gen_rhs: dimension mismatch");
  if (!consistent && basis.r == n)
    throw std::invalid_argument("gen_rhs: full-rank matrix has no inconsistent right-hand side");
  Rng rng(seed);
  Vector b = matvec(a, rng.normal_vector(a.cols()));
  if (consistent) return b;

  Vector z = rng.normal_vector(n - basis.r);
  const double ratio = 0.25 + 1.75 * rng.uniform();
  const double nb = norm2(b);
  const double target = nb > 0.0 ? ratio * nb : ratio;
  const Vector perp = matvec(basis.q2, z);
  axpy(target / norm2(perp), perp, b);
  return b;
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_vector(n);
}

}  // namespace sgmres
