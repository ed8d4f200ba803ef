#include "sgmres/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgmres {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Breakdown: return "breakdown";
    case Termination::MaxIter: return "max_iter";
    case Termination::ResidualTol: return "residual_tol";
    case Termination::NormalEqTol: return "normal_eq_tol";
  }
  return "unknown";
}

std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::Breakdown, Termination::MaxIter, Termination::ResidualTol,
                 Termination::NormalEqTol})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

Matrix HessenbergFactors::square(std::size_t j) const {
  Matrix h(j, j);
  for (std::size_t r = 0; r < j; ++r)
    for (std::size_t c = 0; c < j; ++c) h(r, c) = hbar(r, c);
  return h;
}

Matrix HessenbergFactors::prefix(std::size_t j) const {
  Matrix h(j + 1, j);
  for (std::size_t r = 0; r <= j; ++r)
    for (std::size_t c = 0; c < j; ++c) h(r, c) = hbar(r, c);
  return h;
}

Matrix KrylovBasis::as_matrix() const { return prefix(columns.size()); }

Matrix KrylovBasis::prefix(std::size_t j) const {
  if (j > columns.size()) throw std::out_of_range("KrylovBasis::prefix");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  return Matrix::from_columns(std::span(columns).first(j), n);
}

ArnoldiStep arnoldi_step(const Matrix& a, const KrylovBasis& basis, double breakdown_threshold,
                         bool reorthogonalize) {
  if (a.rows() != a.cols()) throw std::invalid_argument("arnoldi_step: A must be square");
  if (basis.size() == 0) throw std::invalid_argument("arnoldi_step: empty basis");
  for (const auto& v : basis.columns)
    if (v.size() != a.cols()) throw std::invalid_argument("arnoldi_step: dimension mismatch");

  const std::size_t j = basis.size();
  ArnoldiStep step;
  step.h.assign(j, 0.0);
  Vector w = matvec(a, basis.columns.back());
  for (std::size_t i = 0; i < j; ++i) {
    step.h[i] = dot(basis.columns[i], w);
    axpy(-step.h[i], basis.columns[i], w);
  }
  if (reorthogonalize) {
    for (std::size_t i = 0; i < j; ++i) {
      const double c = dot(basis.columns[i], w);
      axpy(-c, basis.columns[i], w);
      step.h[i] += c;
    }
  }
  step.h_next = norm2(w);
  if (step.h_next > breakdown_threshold) step.v_next = scaled(1.0 / step.h_next, w);
  return step;
}

HessenbergSolution hessenberg_lstsq(const Matrix& hbar, double beta, double tol_rank) {
  if (beta < 0.0) throw std::invalid_argument("hessenberg_lstsq: beta must be nonnegative");
  Vector rhs(hbar.rows(), 0.0);
  if (!rhs.empty()) rhs[0] = beta;
  HessenbergSolution s;
  s.y = min_norm_lstsq(hbar, rhs, tol_rank);
  s.rho = norm2(subtract(rhs, matvec(hbar, s.y)));
  return s;
}

GivensLeastSquares::GivensLeastSquares(double beta) : g_{beta} {}

double GivensLeastSquares::push_column(std::span<const double> h_col) {
  const std::size_t j = r_cols_.size() + 1;
  if (h_col.size() != j + 1) throw std::invalid_argument("GivensLeastSquares: column length");
  Vector col(h_col.begin(), h_col.end());
  for (std::size_t i = 0; i + 1 < j; ++i) {
    const double top = col[i];
    const double bot = col[i + 1];
    col[i] = cs_[i] * top + sn_[i] * bot;
    col[i + 1] = -sn_[i] * top + cs_[i] * bot;
  }
  const double a = col[j - 1];
  const double b = col[j];
  const double hyp = std::hypot(a, b);
  double c = 1.0;
  double s = 0.0;
  if (hyp > 0.0) {
    c = a / hyp;
    s = b / hyp;
  }
  col[j - 1] = hyp;
  col.pop_back();
  cs_.push_back(c);
  sn_.push_back(s);
  r_cols_.push_back(std::move(col));
  const double gj = g_.back();
  g_.back() = c * gj;
  g_.push_back(-s * gj);
  return std::abs(g_.back());
}

bool GivensLeastSquares::rank_deficient(double tol_rank) const {
  double lo = INFINITY;
  double hi = 0.0;
  for (std::size_t i = 0; i < r_cols_.size(); ++i) {
    lo = std::min(lo, std::abs(r_cols_[i][i]));
    hi = std::max(hi, std::abs(r_cols_[i][i]));
  }
  return hi == 0.0 || lo <= tol_rank * hi;
}

Vector GivensLeastSquares::solve() const {
  const std::size_t k = r_cols_.size();
  Vector y(k, 0.0);
  for (std::size_t ii = k; ii-- > 0;) {
    double s = g_[ii];
    for (std::size_t c = ii + 1; c < k; ++c) s -= r_cols_[c][ii] * y[c];
    y[ii] = s / r_cols_[ii][ii];
  }
  return y;
}

Matrix assemble_hessenberg(const std::vector<Vector>& hcols) {
  const std::size_t k = hcols.size();
  Matrix h(k + 1, k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < hcols[c].size(); ++r) h(r, c) = hcols[c][r];
  return h;
}

HessenbergSolution final_hessenberg_solve(const GivensLeastSquares& givens,
                                          const std::vector<Vector>& hcols, double beta,
                                          double tol_rank) {
  if (!givens.rank_deficient(tol_rank)) return {givens.solve(), givens.residual_estimate()};
  return hessenberg_lstsq(assemble_hessenberg(hcols), beta, tol_rank);
}

namespace {

Vector combine(std::span<const double> x0, const KrylovBasis& basis, std::span<const double> y) {
  Vector x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < y.size(); ++i) axpy(y[i], basis.columns[i], x);
  return x;
}

}  // namespace

GmresResult gmres(const Matrix& a, std::span<const double> b, std::span<const double> x0,
                  const SolverOptions& opts) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("gmres: A must be square");
  if (b.size() != n || x0.size() != n) throw std::invalid_argument("gmres: dimension mismatch");
  if (!all_finite(a.data()) || !all_finite(b) || !all_finite(x0))
    throw std::invalid_argument("gmres: non-finite input");

  const double scale = frobenius_norm(a);
  const std::size_t max_iter = opts.max_iter.value_or(n);
  const double threshold = opts.tol_breakdown * scale;

  GmresResult result;
  const Vector r0 = subtract(b, matvec(a, x0));
  const double beta = norm2(r0);
  result.hessenberg.beta = beta;
  result.x.assign(x0.begin(), x0.end());
  result.residual_norm = beta;
  result.hessenberg.hbar = Matrix(1, 0);
  if (beta == 0.0) {
    result.termination = Termination::ResidualTol;
    return result;
  }
  if (max_iter == 0) {
    result.termination = Termination::MaxIter;
    return result;
  }

  result.basis.columns.push_back(scaled(1.0 / beta, r0));
  GivensLeastSquares givens(beta);
  std::vector<Vector> hcols;

  for (std::size_t j = 1;; ++j) {
    ArnoldiStep step = arnoldi_step(a, result.basis, threshold, opts.reorthogonalize);
    Vector col = step.h;
    col.push_back(step.h_next);
    givens.push_column(col);
    hcols.push_back(std::move(col));

    IterationRecord rec;
    rec.j = j;
    rec.h_next = step.h_next;

    const bool broke_down = !step.v_next.has_value();
    if (broke_down) {
      auto sol = final_hessenberg_solve(givens, hcols, beta, opts.tol_rank);
      result.y = std::move(sol.y);
      rec.residual_estimate = sol.rho;
    } else {
      result.basis.columns.push_back(std::move(*step.v_next));
      result.y = givens.solve();
      rec.residual_estimate = givens.residual_estimate();
    }

    Vector x = combine(x0, result.basis, result.y);
    const Vector r = subtract(b, matvec(a, x));
    rec.residual = norm2(r);
    const double ne = norm2(matvec_transposed(a, r));
    rec.normal_eq_rel = rec.residual > 0.0 && scale > 0.0 ? ne / (scale * rec.residual) : 0.0;
    result.trace.push_back(rec);
    result.iterates.push_back(x);
    result.x = std::move(x);
    result.residual_norm = rec.residual;

    if (broke_down) {
      result.termination = Termination::Breakdown;
      result.breakdown_index = j;
      break;
    }
    if (rec.residual_estimate <= opts.rtol * beta) {
      result.termination = Termination::ResidualTol;
      break;
    }
    if (opts.netol > 0.0 && ne <= opts.netol * scale * rec.residual) {
      result.termination = Termination::NormalEqTol;
      break;
    }
    if (j >= max_iter) {
      result.termination = Termination::MaxIter;
      break;
    }
  }

  result.hessenberg.k = hcols.size();
  result.hessenberg.hbar = assemble_hessenberg(hcols);
  return result;
}

double arnoldi_relation_error(const Matrix& a, const GmresResult& result, std::size_t j) {
  if (j == 0 || j > result.steps()) throw std::out_of_range("arnoldi_relation_error");
  const Matrix vj = result.basis.prefix(j);
  const Matrix av = matmul(a, vj);
  if (result.basis.size() > j)
    return frobenius_norm(subtract(av, matmul(result.basis.prefix(j + 1), result.hessenberg.prefix(j))));
  return frobenius_norm(subtract(av, matmul(vj, result.hessenberg.square(j))));
}

double basis_orthonormality_error(const GmresResult& result) {
  if (result.basis.size() == 0) return 0.0;
  return orthonormality_error(result.basis.as_matrix());
}

}  // namespace sgmres
