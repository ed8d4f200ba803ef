#include "sgmres/range_decomposition.hpp"

#include <stdexcept>

namespace sgmres {

Matrix RangeBasis::q() const {
  const std::size_t n = q1.rows();
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < q1.cols(); ++j) q(i, j) = q1(i, j);
    for (std::size_t j = 0; j < q2.cols(); ++j) q(i, q1.cols() + j) = q2(i, j);
  }
  return q;
}

RangeBasis range_basis(const SvdFactors& f, double tol_rank) {
  const std::size_t n = f.u.rows();
  const std::size_t r = numerical_rank(f, tol_rank);
  if (r == 0) throw std::domain_error("range_basis: matrix is numerically zero");
  return {f.u.column_block(0, r), f.u.column_block(r, n - r), r};
}

RangeBasis range_basis(const Matrix& a, double tol_rank) {
  if (a.rows() != a.cols()) throw std::invalid_argument("range_basis: A must be square");
  return range_basis(svd(a), tol_rank);
}

DecomposedMatrix decompose_matrix(const Matrix& a, const RangeBasis& basis) {
  if (a.rows() != a.cols() || a.rows() != basis.n() || basis.q2.rows() != basis.n() ||
      basis.q1.cols() + basis.q2.cols() != basis.n())
    throw std::invalid_argument("decompose_matrix: dimension mismatch");
  const Matrix q1t = transpose(basis.q1);
  DecomposedMatrix d;
  d.a11 = matmul(q1t, matmul(a, basis.q1));
  d.a12 = matmul(q1t, matmul(a, basis.q2));
  d.residual_lower_block_norm = frobenius_norm(matmul(transpose(basis.q2), a));
  return d;
}

RangeSymmetry range_symmetry(const Matrix& a, const DecomposedMatrix& d, double tol) {
  const double na = frobenius_norm(a);
  RangeSymmetry s;
  s.a12_rel = na > 0.0 ? frobenius_norm(d.a12) / na : 0.0;
  s.flag = s.a12_rel <= tol;
  return s;
}

RangeSymmetry is_range_symmetric(const Matrix& a, double tol, double tol_rank) {
  const RangeBasis basis = range_basis(a, tol_rank);
  return range_symmetry(a, decompose_matrix(a, basis), tol);
}

TheoremVerdicts check_structure_theorems(const Matrix& a, double tol, double tol_rank) {
  if (a.rows() != a.cols()) throw std::invalid_argument("check_structure_theorems: A must be square");
  const std::size_t n = a.rows();
  const SvdFactors f = svd(a);
  const RangeBasis basis = range_basis(f, tol_rank);
  const std::size_t r = basis.r;
  const DecomposedMatrix d = decompose_matrix(a, basis);

  TheoremVerdicts v;
  v.r = r;

  const Vector s11 = singular_values(d.a11);
  v.a11_rcond = s11.front() > 0.0 ? s11.back() / s11.front() : 0.0;
  v.a11_nonsingular = s11.back() > tol * s11.front();

  // R(A) ∩ N(A) = {0} iff [Q1 | N] has full column rank r + (n - r).
  Matrix joined(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) joined(i, j) = basis.q1(i, j);
    for (std::size_t j = r; j < n; ++j) joined(i, j) = f.v(i, j);
  }
  const Vector sj = singular_values(joined);
  v.intersection_sigma_min = sj.back();
  v.range_null_trivial = numerical_rank(sj, tol_rank) == n;

  const RangeSymmetry sym = range_symmetry(a, d, tol);
  v.a12_rel = sym.a12_rel;
  v.a12_zero = sym.flag;
  return v;
}

SplitVector decompose_vector(std::span<const double> v, const RangeBasis& basis) {
  if (v.size() != basis.n()) throw std::invalid_argument("decompose_vector: dimension mismatch");
  return {matvec_transposed(basis.q1, v), matvec_transposed(basis.q2, v)};
}

Vector recompose(std::span<const double> v1, std::span<const double> v2, const RangeBasis& basis) {
  if (v1.size() != basis.q1.cols() || v2.size() != basis.q2.cols())
    throw std::invalid_argument("recompose: dimension mismatch");
  Vector v = matvec(basis.q1, v1);
  if (!v2.empty()) axpy(1.0, matvec(basis.q2, v2), v);
  return v;
}

}  // namespace sgmres
