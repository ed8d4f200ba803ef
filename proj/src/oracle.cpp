#include "sgmres/oracle.hpp"

#include <stdexcept>

namespace sgmres {

LsVerdict certify_least_squares(const Matrix& a, std::span<const double> b,
                                std::span<const double> x, double tol, double tol_rank) {
  if (b.size() != a.rows() || x.size() != a.cols())
    throw std::invalid_argument("certify_least_squares: dimension mismatch");
  LsVerdict v;
  const double na = frobenius_norm(a);
  const Vector r = subtract(b, matvec(a, x));
  v.residual = norm2(r);
  v.normal_eq_rel = norm2(matvec_transposed(a, r)) /
                    (na * (norm2(b) + na * norm2(x)) + certificate_tiny);

  const Vector xo = min_norm_lstsq(a, b, tol_rank);
  v.oracle_residual = norm2(subtract(b, matvec(a, xo)));
  v.gap = v.residual - v.oracle_residual;
  v.is_ls = v.normal_eq_rel <= tol && v.gap <= tol * (v.oracle_residual + 1.0);
  return v;
}

double residual_floor(std::span<const double> b, const RangeBasis& basis) {
  if (b.size() != basis.n()) throw std::invalid_argument("residual_floor: dimension mismatch");
  return norm2(matvec_transposed(basis.q2, b));
}

}  // namespace sgmres
