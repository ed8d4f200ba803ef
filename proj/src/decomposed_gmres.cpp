#include "sgmres/decomposed_gmres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgmres {

namespace {

double block_dot(const Vector& u1, const Vector& u2, const Vector& w1, const Vector& w2) {
  return dot(u1, w1) + dot(u2, w2);
}

Vector combine(std::span<const double> x0, const std::vector<Vector>& cols,
               std::span<const double> y) {
  Vector x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < y.size(); ++i) axpy(y[i], cols[i], x);
  return x;
}

Matrix columns_matrix(const std::vector<Vector>& cols, std::size_t count, std::size_t rows) {
  return Matrix::from_columns(std::span(cols).first(count), rows);
}

}  // namespace

DecomposedRun decomposed_gmres(const Matrix& a, std::span<const double> b,
                               std::span<const double> x0, const RangeBasis& basis,
                               const SolverOptions& opts) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("decomposed_gmres: A must be square");
  if (basis.n() != n || basis.q1.cols() != basis.r || basis.q2.cols() != n - basis.r ||
      basis.q2.rows() != n)
    throw std::invalid_argument("decomposed_gmres: inconsistent basis dimensions");
  if (b.size() != n || x0.size() != n) throw std::invalid_argument("decomposed_gmres: dimension mismatch");
  if (!all_finite(a.data()) || !all_finite(b) || !all_finite(x0))
    throw std::invalid_argument("decomposed_gmres: non-finite input");

  DecomposedRun run;
  DecomposedTrace& t = run.trace;
  GmresResult& res = run.result;

  t.a = a;
  t.b.assign(b.begin(), b.end());
  t.basis = basis;
  t.blocks = decompose_matrix(a, basis);
  t.simplified = range_symmetry(a, t.blocks, opts.tol_range_symmetric).flag;
  const Matrix& a11 = t.blocks.a11;
  const Matrix& a12 = t.blocks.a12;
  const bool use_a12 = !t.simplified;

  const double scale = frobenius_norm(a);
  const double threshold = opts.tol_breakdown * scale;
  const std::size_t max_iter = opts.max_iter.value_or(n);

  auto sb = decompose_vector(b, basis);
  auto sx = decompose_vector(x0, basis);
  t.b1 = std::move(sb.v1);
  t.b2 = std::move(sb.v2);
  t.x0_1 = std::move(sx.v1);
  t.x0_2 = std::move(sx.v2);
  const double b2_norm = norm2(t.b2);
  t.consistent = b2_norm <= opts.tol_rank * norm2(b);

  auto apply = [&](const Vector& u1, const Vector& u2) {
    Vector w = matvec(a11, u1);
    if (use_a12) axpy(1.0, matvec(a12, u2), w);
    return w;
  };
  auto residual_top = [&](const Vector& x1, const Vector& x2) { return subtract(t.b1, apply(x1, x2)); };

  t.r0_1 = residual_top(t.x0_1, t.x0_2);
  const double beta = std::hypot(norm2(t.r0_1), b2_norm);
  t.beta = beta;
  t.hessenberg.beta = beta;
  t.hessenberg.hbar = Matrix(1, 0);
  t.x1 = t.x0_1;
  t.x2 = t.x0_2;
  res.hessenberg = t.hessenberg;
  res.x.assign(x0.begin(), x0.end());
  res.residual_norm = beta;
  if (beta == 0.0) {
    res.termination = Termination::ResidualTol;
    return run;
  }
  if (max_iter == 0) {
    res.termination = Termination::MaxIter;
    return run;
  }

  auto push_vector = [&](Vector u1, Vector u2) {
    t.c.push_back(b2_norm > 0.0 ? dot(u2, t.b2) / (b2_norm * b2_norm) : 0.0);
    res.basis.columns.push_back(recompose(u1, u2, basis));
    t.v1.push_back(std::move(u1));
    t.v2.push_back(std::move(u2));
  };
  push_vector(scaled(1.0 / beta, t.r0_1), scaled(1.0 / beta, t.b2));

  GivensLeastSquares givens(beta);
  std::vector<Vector> hcols;

  for (std::size_t j = 1;; ++j) {
    // h_{i,j} = (v^1_i, A11 v^1_j + A12 v^2_j); the v^2 recurrence only
    // subtracts projections.
    Vector w1 = apply(t.v1.back(), t.v2.back());
    Vector w2(n - basis.r, 0.0);
    Vector h(j, 0.0);
    const int passes = opts.reorthogonalize ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double hij = block_dot(t.v1[i], t.v2[i], w1, w2);
        axpy(-hij, t.v1[i], w1);
        axpy(-hij, t.v2[i], w2);
        h[i] += hij;
      }
    }
    const double h_next = std::hypot(norm2(w1), norm2(w2));
    Vector col = h;
    col.push_back(h_next);
    givens.push_column(col);
    hcols.push_back(std::move(col));

    IterationRecord rec;
    rec.j = j;
    rec.h_next = h_next;
    const bool broke_down = !(h_next > threshold);
    if (broke_down) {
      auto sol = final_hessenberg_solve(givens, hcols, beta, opts.tol_rank);
      res.y = std::move(sol.y);
      rec.residual_estimate = sol.rho;
    } else {
      push_vector(scaled(1.0 / h_next, w1), scaled(1.0 / h_next, w2));
      res.y = givens.solve();
      rec.residual_estimate = givens.residual_estimate();
    }

    Vector x1 = combine(t.x0_1, t.v1, res.y);
    Vector x2 = combine(t.x0_2, t.v2, res.y);
    const Vector r1 = residual_top(x1, x2);
    rec.residual = std::hypot(norm2(r1), b2_norm);
    // A^T r = Q [A11^T r^1; A12^T r^1]
    double ne = norm2(matvec_transposed(a11, r1));
    if (use_a12) ne = std::hypot(ne, norm2(matvec_transposed(a12, r1)));
    rec.normal_eq_rel = rec.residual > 0.0 && scale > 0.0 ? ne / (scale * rec.residual) : 0.0;

    res.trace.push_back(rec);
    res.iterates.push_back(recompose(x1, x2, basis));
    res.x = res.iterates.back();
    res.residual_norm = rec.residual;
    t.iterates_1.push_back(x1);
    t.iterates_2.push_back(x2);
    t.x1 = std::move(x1);
    t.x2 = std::move(x2);

    if (broke_down) {
      res.termination = Termination::Breakdown;
      res.breakdown_index = j;
      break;
    }
    if (rec.residual_estimate <= opts.rtol * beta) {
      res.termination = Termination::ResidualTol;
      break;
    }
    if (opts.netol > 0.0 && ne <= opts.netol * scale * rec.residual) {
      res.termination = Termination::NormalEqTol;
      break;
    }
    if (j >= max_iter) {
      res.termination = Termination::MaxIter;
      break;
    }
  }

  t.hessenberg.k = hcols.size();
  t.hessenberg.hbar = assemble_hessenberg(hcols);
  res.hessenberg = t.hessenberg;
  for (const auto& e : rank_profile(t, opts.tol_rank)) t.rank_v1.push_back(e.rank);
  return run;
}

BlockRelationError block_relation_error(const DecomposedTrace& t, std::size_t j) {
  if (j == 0 || j > t.steps()) throw std::out_of_range("block_relation_error");
  const std::size_t r = t.basis.r;
  const std::size_t nr = t.basis.n() - r;
  const Matrix v1j = columns_matrix(t.v1, j, r);
  const Matrix v2j = columns_matrix(t.v2, j, nr);
  Matrix lhs = matmul(t.blocks.a11, v1j);
  if (!t.simplified) {
    const Matrix extra = matmul(t.blocks.a12, v2j);
    auto ld = lhs.data();
    auto ed = extra.data();
    for (std::size_t i = 0; i < ld.size(); ++i) ld[i] += ed[i];
  }
  BlockRelationError e;
  if (t.v1.size() > j) {
    const Matrix hbar = t.hessenberg.prefix(j);
    e.top = frobenius_norm(subtract(lhs, matmul(columns_matrix(t.v1, j + 1, r), hbar)));
    e.bottom = frobenius_norm(matmul(columns_matrix(t.v2, j + 1, nr), hbar));
  } else {
    const Matrix hj = t.hessenberg.square(j);
    e.top = frobenius_norm(subtract(lhs, matmul(v1j, hj)));
    e.bottom = frobenius_norm(matmul(v2j, hj));
  }
  return e;
}

ParallelismReport lemma_parallelism_check(const DecomposedTrace& t, double eps) {
  ParallelismReport p;
  const std::size_t k = t.v2.size();
  p.coeffs.assign(k, 0.0);
  p.sin_angle.assign(k, 0.0);
  p.present.assign(k, false);
  const double nb = norm2(t.b2);
  if (!(nb > eps)) return p;
  const Vector bhat = scaled(1.0 / nb, t.b2);
  for (std::size_t i = 0; i < k; ++i) {
    const Vector& v = t.v2[i];
    const double nv = norm2(v);
    if (!(nv > eps)) continue;
    p.present[i] = true;
    p.coeffs[i] = dot(v, t.b2) / (nb * nb);
    Vector perp = v;
    axpy(-dot(v, bhat), bhat, perp);
    p.sin_angle[i] = std::min(1.0, norm2(perp) / nv);
    p.max_angle = std::max(p.max_angle, p.sin_angle[i]);
  }
  return p;
}

ParallelismReport lemma_parallelism_check(const DecomposedTrace& t) {
  return lemma_parallelism_check(t, 1e-12 * t.beta);
}

std::vector<RankEntry> rank_profile(const DecomposedTrace& t, double tol_rank) {
  std::vector<RankEntry> out;
  const std::size_t r = t.basis.r;
  for (std::size_t j = 1; j <= t.steps(); ++j) {
    const Vector s = singular_values(columns_matrix(t.v1, j, r));
    const double threshold = tol_rank * std::sqrt(static_cast<double>(j));
    RankEntry e;
    e.j = j;
    e.rank = static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](double x) { return x > threshold; }));
    e.pass = t.consistent ? e.rank == j : (e.rank == j || e.rank + 1 == j);
    out.push_back(e);
  }
  return out;
}

ResidualSplit residual_split_check(const DecomposedTrace& t, std::span<const double> x) {
  const Vector r = subtract(t.b, matvec(t.a, x));
  const SplitVector sx = decompose_vector(x, t.basis);
  Vector r1 = subtract(t.b1, matvec(t.blocks.a11, sx.v1));
  if (!sx.v2.empty()) axpy(-1.0, matvec(t.blocks.a12, sx.v2), r1);
  const double nr = norm2(r);
  const double n1 = norm2(r1);
  const double n2 = norm2(t.b2);
  return {nr * nr, n1 * n1 + n2 * n2};
}

Equivalence compare_runs(const GmresResult& plain, const GmresResult& decomposed) {
  Equivalence e;
  e.same_steps = plain.steps() == decomposed.steps() &&
                 plain.breakdown_index == decomposed.breakdown_index;
  e.same_termination = plain.termination == decomposed.termination;
  const Matrix& hp = plain.hessenberg.hbar;
  const Matrix& hd = decomposed.hessenberg.hbar;
  if (hp.rows() != hd.rows() || hp.cols() != hd.cols()) {
    e.hessenberg_err = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < hp.rows(); ++i)
      for (std::size_t j = 0; j < hp.cols(); ++j)
        e.hessenberg_err = std::max(e.hessenberg_err,
                                    std::abs(hp(i, j) - hd(i, j)) / std::max(1.0, std::abs(hp(i, j))));
  }
  const double xnorm = norm2(plain.x);
  for (std::size_t i = 0; i < plain.x.size(); ++i)
    e.solution_err = std::max(e.solution_err, std::abs(plain.x[i] - decomposed.x[i]) / (xnorm + 1.0));
  return e;
}

}  // namespace sgmres
