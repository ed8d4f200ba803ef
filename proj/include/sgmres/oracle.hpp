#pragma once

#include "sgmres/linalg.hpp"
#include "sgmres/range_decomposition.hpp"

namespace sgmres {

/// Two-sided least-squares certificate: normal equations plus the residual
/// gap against the pseudoinverse solution.
struct LsVerdict {
  bool is_ls = false;
  double normal_eq_rel = 0.0;  // ||A^T(b - Ax)|| / (||A||_F (||b|| + ||A||_F ||x||) + tiny)
  double residual = 0.0;
  double oracle_residual = 0.0;
  double gap = 0.0;  // residual - oracle_residual
};

inline constexpr double certificate_tiny = 1e-300;

LsVerdict certify_least_squares(const Matrix& a, std::span<const double> b,
                                std::span<const double> x, double tol,
                                double tol_rank = default_tol_rank);

/// ||Q2^T b||, a lower bound on min_x ||b - Ax||.
double residual_floor(std::span<const double> b, const RangeBasis& basis);

}  // namespace sgmres
