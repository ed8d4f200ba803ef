#pragma once

#include <cstddef>

#include "sgmres/linalg.hpp"

namespace sgmres {

/// Orthonormal bases of R(A) (q1, r columns) and its orthogonal complement
/// (q2, n - r columns).
struct RangeBasis {
  Matrix q1;
  Matrix q2;
  std::size_t r = 0;

  std::size_t n() const noexcept { return q1.rows(); }
  /// [Q1, Q2]
  Matrix q() const;
};

/// Q^T A Q = [A11 A12; 0 0].
struct DecomposedMatrix {
  Matrix a11;
  Matrix a12;
  double residual_lower_block_norm = 0.0;  // ||Q2^T A Q||_F
};

/// Q1/Q2 from the left singular vectors of A, split at tol_rank * sigma_1.
/// Throws std::domain_error when A has numerical rank 0.
RangeBasis range_basis(const Matrix& a, double tol_rank = default_tol_rank);
RangeBasis range_basis(const SvdFactors& f, double tol_rank = default_tol_rank);

DecomposedMatrix decompose_matrix(const Matrix& a, const RangeBasis& basis);

struct RangeSymmetry {
  bool flag = false;
  double a12_rel = 0.0;  // ||A12||_F / ||A||_F
};

RangeSymmetry is_range_symmetric(const Matrix& a, double tol, double tol_rank = default_tol_rank);
RangeSymmetry range_symmetry(const Matrix& a, const DecomposedMatrix& d, double tol);

struct TheoremVerdicts {
  bool a11_nonsingular = false;      // sigma_min(A11) > tol * sigma_max(A11)
  bool range_null_trivial = false;   // R(A) ∩ N(A) = {0}
  bool a12_zero = false;             // ||A12||_F / ||A||_F <= tol
  double a11_rcond = 0.0;
  double intersection_sigma_min = 0.0;  // smallest singular value of [Q1 | N]
  double a12_rel = 0.0;
  std::size_t r = 0;

  bool equivalence_holds() const noexcept { return a11_nonsingular == range_null_trivial; }
  bool implication_holds() const noexcept { return !a12_zero || a11_nonsingular; }
};

/// Evaluates the three structural predicates. The null space basis comes from
/// the right singular vectors at the same rank threshold as Q1.
TheoremVerdicts check_structure_theorems(const Matrix& a, double tol,
                                         double tol_rank = default_tol_rank);

struct SplitVector {
  Vector v1;  // Q1^T v
  Vector v2;  // Q2^T v
};

SplitVector decompose_vector(std::span<const double> v, const RangeBasis& basis);
Vector recompose(std::span<const double> v1, std::span<const double> v2, const RangeBasis& basis);

}  // namespace sgmres
