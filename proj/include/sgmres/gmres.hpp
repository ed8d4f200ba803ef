#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sgmres/linalg.hpp"

namespace sgmres {

struct SolverOptions {
  /// Breakdown when h_{j+1,j} <= tol_breakdown * ||A||_F.
  double tol_breakdown = 1e-12;
  double tol_rank = default_tol_rank;
  /// Stop when the residual estimate drops to rtol * ||r0||.
  double rtol = 1e-12;
  /// Stop when ||A^T r_j|| <= netol * ||A||_F * ||r_j||; 0 disables the test.
  double netol = 0.0;
  /// Iteration cap; the system dimension when unset.
  std::optional<std::size_t> max_iter;
  bool reorthogonalize = true;
  /// The decomposed run uses the A12 = 0 recurrence when ||A12||_F / ||A||_F <= this.
  double tol_range_symmetric = 1e-10;
};

enum class Termination { Breakdown, MaxIter, ResidualTol, NormalEqTol };

std::string_view to_string(Termination t);
std::optional<Termination> termination_from_string(std::string_view s);

/// The (k+1) x k upper Hessenberg matrix built by Arnoldi, with beta = ||r0||.
struct HessenbergFactors {
  std::size_t k = 0;
  Matrix hbar;
  double beta = 0.0;

  double subdiagonal(std::size_t j) const { return hbar(j + 1, j); }
  /// Leading j x j block H_j.
  Matrix square(std::size_t j) const;
  /// Leading (j+1) x j block.
  Matrix prefix(std::size_t j) const;
};

/// Orthonormal Krylov vectors v_1, v_2, ..., stored as columns.
struct KrylovBasis {
  std::vector<Vector> columns;

  std::size_t size() const noexcept { return columns.size(); }
  Matrix as_matrix() const;
  /// First j columns.
  Matrix prefix(std::size_t j) const;
};

struct ArnoldiStep {
  Vector h;           // h_{i,j}, i = 1..j
  double h_next = 0;  // h_{j+1,j}
  std::optional<Vector> v_next;
};

/// One Arnoldi step on the last column of `basis` with modified Gram-Schmidt
/// (plus an optional second pass). `v_next` is absent when
/// h_next <= breakdown_threshold.
ArnoldiStep arnoldi_step(const Matrix& a, const KrylovBasis& basis, double breakdown_threshold,
                         bool reorthogonalize = true);

struct HessenbergSolution {
  Vector y;
  double rho = 0.0;
};

/// Minimum-norm minimizer of ||beta e_1 - hbar y||_2 by truncated SVD.
HessenbergSolution hessenberg_lstsq(const Matrix& hbar, double beta,
                                    double tol_rank = default_tol_rank);

/// Incremental Givens QR of the Hessenberg least-squares problem.
class GivensLeastSquares {
 public:
  explicit GivensLeastSquares(double beta);

  /// Appends column j (length j+1, last entry h_{j+1,j}); returns the new
  /// residual estimate |g_{j+1}|.
  double push_column(std::span<const double> h_col);

  std::size_t size() const noexcept { return r_cols_.size(); }
  double residual_estimate() const noexcept { return std::abs(g_.back()); }
  /// min |R_ii| <= tol_rank * max |R_ii|.
  bool rank_deficient(double tol_rank) const;
  /// Back substitution R y = g.
  Vector solve() const;

 private:
  std::vector<Vector> r_cols_;
  Vector cs_;
  Vector sn_;
  Vector g_;
};

struct IterationRecord {
  std::size_t j = 0;
  double h_next = 0.0;
  double residual_estimate = 0.0;
  double residual = 0.0;       // ||b - A x_j||
  double normal_eq_rel = 0.0;  // ||A^T r_j|| / (||A||_F ||r_j||)
};

struct GmresResult {
  Vector x;
  Vector y;
  std::vector<IterationRecord> trace;
  std::vector<Vector> iterates;  // x_1, ..., x_k
  Termination termination = Termination::ResidualTol;
  std::optional<std::size_t> breakdown_index;
  HessenbergFactors hessenberg;
  KrylovBasis basis;  // k columns at breakdown, k+1 otherwise
  double residual_norm = 0.0;

  std::size_t steps() const noexcept { return hessenberg.k; }
};

/// GMRES for square, possibly singular A. Returns x0 with k = 0 when r0 = 0.
GmresResult gmres(const Matrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverOptions& opts = {});

/// ||A V_j - V_{j+1} Hbar_j||_F, or ||A V_j - V_j H_j||_F when v_{j+1} was
/// not formed (breakdown).
double arnoldi_relation_error(const Matrix& a, const GmresResult& result, std::size_t j);
/// ||V^T V - I||_F over every stored Krylov vector.
double basis_orthonormality_error(const GmresResult& result);

/// Solves the final Hessenberg problem the way both solvers do: back
/// substitution when R is well conditioned, else truncated SVD.
HessenbergSolution final_hessenberg_solve(const GivensLeastSquares& givens,
                                          const std::vector<Vector>& hcols, double beta,
                                          double tol_rank);
Matrix assemble_hessenberg(const std::vector<Vector>& hcols);

}  // namespace sgmres
