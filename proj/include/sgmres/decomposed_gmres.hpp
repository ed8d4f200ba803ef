#pragma once

#include <cstddef>
#include <vector>

#include "sgmres/gmres.hpp"
#include "sgmres/range_decomposition.hpp"

namespace sgmres {

/// Record of a GMRES run carried out in (R(A), R(A)^perp) coordinates.
struct DecomposedTrace {
  Matrix a;
  Vector b;
  RangeBasis basis;
  DecomposedMatrix blocks;
  bool simplified = false;  // ran the A12 = 0 recurrence
  bool consistent = false;  // ||b2|| <= tol_rank * ||b||

  std::vector<Vector> v1;  // columns v^1_i, length r
  std::vector<Vector> v2;  // columns v^2_i, length n - r
  HessenbergFactors hessenberg;
  Vector b1, b2, x0_1, x0_2, r0_1;
  double beta = 0.0;
  Vector c;  // <v^2_i, b^2> / ||b^2||^2
  Vector x1, x2;
  std::vector<Vector> iterates_1;  // x^1_j for j = 1..k
  std::vector<Vector> iterates_2;
  std::vector<std::size_t> rank_v1;  // rank V^1_j, j = 1..k

  std::size_t steps() const noexcept { return hessenberg.k; }
};

struct DecomposedRun {
  GmresResult result;  // x, basis and iterates recomposed into R^n
  DecomposedTrace trace;
};

/// GMRES expressed through b^1 = Q1^T b, b^2 = Q2^T b and the blocks A11, A12,
/// with its own recurrence for v^1 and v^2. Uses the A12 = 0 listing when
/// ||A12||_F / ||A||_F <= opts.tol_range_symmetric.
DecomposedRun decomposed_gmres(const Matrix& a, std::span<const double> b,
                               std::span<const double> x0, const RangeBasis& basis,
                               const SolverOptions& opts = {});

struct BlockRelationError {
  double top = 0.0;     // ||A11 V1_j + A12 V2_j - V1_{j+1} Hbar_j||_F
  double bottom = 0.0;  // ||V2_{j+1} Hbar_j||_F
};

/// Block form of the Arnoldi relation for prefix j (the square H_j form at
/// breakdown). The A12 term is dropped for simplified runs.
BlockRelationError block_relation_error(const DecomposedTrace& trace, std::size_t j);

struct ParallelismReport {
  Vector coeffs;     // c_i; 0 where v^2_i is absent
  Vector sin_angle;  // sin angle(v^2_i, b^2); 0 where absent
  std::vector<bool> present;
  double max_angle = 0.0;
};

/// Checks that every R(A)^perp component v^2_i with ||v^2_i|| > eps is
/// parallel to b^2.
ParallelismReport lemma_parallelism_check(const DecomposedTrace& trace, double eps);
/// eps = 1e-12 * ||r0||
ParallelismReport lemma_parallelism_check(const DecomposedTrace& trace);

struct RankEntry {
  std::size_t j = 0;
  std::size_t rank = 0;
  bool pass = false;
};

/// rank V^1_j for every prefix, with absolute threshold tol_rank * sqrt(j).
/// PASS when rank = j for consistent b and rank in {j-1, j} otherwise.
std::vector<RankEntry> rank_profile(const DecomposedTrace& trace, double tol_rank = default_tol_rank);

struct ResidualSplit {
  double lhs = 0.0;  // ||b - A x||^2
  double rhs = 0.0;  // ||r^1||^2 + ||b^2||^2
};

ResidualSplit residual_split_check(const DecomposedTrace& trace, std::span<const double> x);

struct Equivalence {
  double hessenberg_err = 0.0;  // max |h_p - h_d| / max(1, |h_p|)
  double solution_err = 0.0;    // max |x_p - x_d| / (||x_p|| + 1)
  bool same_steps = false;
  bool same_termination = false;
};

Equivalence compare_runs(const GmresResult& plain, const GmresResult& decomposed);

}  // namespace sgmres
