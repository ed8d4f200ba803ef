#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgmres/gmres.hpp"
#include "sgmres/matgen.hpp"
#include "support.hpp"

using namespace sgmres;
using doctest::Approx;

TEST_CASE("arnoldi_step on the identity breaks down at once") {
  KrylovBasis v;
  v.columns.push_back({1, 0});
  const ArnoldiStep s = arnoldi_step(Matrix::identity(2), v, 1e-12 * std::sqrt(2.0));
  CHECK(s.h == Vector{1.0});
  CHECK(s.h_next == 0.0);
  CHECK_FALSE(s.v_next.has_value());
}

TEST_CASE("arnoldi_step on the shift: A e1 = 0") {
  KrylovBasis v;
  v.columns.push_back({1, 0});
  const ArnoldiStep s = arnoldi_step(Matrix{{0, 1}, {0, 0}}, v, 1e-12);
  CHECK(s.h == Vector{0.0});
  CHECK(s.h_next == 0.0);
  CHECK_FALSE(s.v_next.has_value());
}

TEST_CASE("arnoldi_step on diag(1,0) with v1 = [1,1]/sqrt2") {
  // Oracle: A v1 = [1/sqrt2, 0]; h11 = 1/2; residual [1,-1]/(2 sqrt2), norm 1/2.
  const double s2 = std::sqrt(2.0);
  KrylovBasis v;
  v.columns.push_back({1 / s2, 1 / s2});
  const ArnoldiStep s = arnoldi_step(Matrix{{1, 0}, {0, 0}}, v, 1e-12);
  CHECK(s.h[0] == Approx(0.5).epsilon(1e-15));
  CHECK(s.h_next == Approx(0.5).epsilon(1e-15));
  REQUIRE(s.v_next.has_value());
  CHECK((*s.v_next)[0] == Approx(1 / s2).epsilon(1e-15));
  CHECK((*s.v_next)[1] == Approx(-1 / s2).epsilon(1e-15));
}

TEST_CASE("arnoldi_step rejects bad input") {
  KrylovBasis v;
  CHECK_THROWS_AS(arnoldi_step(Matrix::identity(2), v, 0.0), std::invalid_argument);
  v.columns.push_back({1, 0, 0});
  CHECK_THROWS_AS(arnoldi_step(Matrix::identity(2), v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(arnoldi_step(Matrix(2, 3), v, 0.0), std::invalid_argument);
}

TEST_CASE("hessenberg_lstsq examples") {
  const HessenbergSolution a = hessenberg_lstsq(Matrix{{1}, {0}}, 2.0);
  CHECK(a.y[0] == Approx(2.0));
  CHECK(a.rho == Approx(0.0));

  const HessenbergSolution z = hessenberg_lstsq(Matrix{{0}}, 1.0);
  CHECK(z.y[0] == 0.0);
  CHECK(z.rho == Approx(1.0));

  // Oracle: minimize (sqrt2 - t)^2 + t^2 with t = (y1 + y2)/2 gives t = sqrt2/2,
  // min-norm split y1 = y2 = t, residual 1.
  const double s2 = std::sqrt(2.0);
  const HessenbergSolution h = hessenberg_lstsq(Matrix{{0.5, 0.5}, {0.5, 0.5}}, s2);
  CHECK(h.y[0] == Approx(s2 / 2).epsilon(1e-14));
  CHECK(h.y[1] == Approx(s2 / 2).epsilon(1e-14));
  CHECK(h.rho == Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(hessenberg_lstsq(Matrix{{1}, {0}}, -1.0), std::invalid_argument);
}

TEST_CASE("Givens least squares agrees with the SVD solve on a full-rank Hessenberg") {
  const Matrix g = testing::gaussian(6, 5, 9);
  std::vector<Vector> cols;
  GivensLeastSquares giv(1.7);
  for (std::size_t j = 0; j < 5; ++j) {
    Vector c(j + 2);
    for (std::size_t i = 0; i < j + 2; ++i) c[i] = g(i, j);
    giv.push_column(c);
    cols.push_back(c);
  }
  const HessenbergSolution ref = hessenberg_lstsq(assemble_hessenberg(cols), 1.7);
  const Vector y = giv.solve();
  for (std::size_t i = 0; i < 5; ++i) CHECK(y[i] == Approx(ref.y[i]).epsilon(1e-11));
  CHECK(giv.residual_estimate() == Approx(ref.rho).epsilon(1e-11));
  CHECK_FALSE(giv.rank_deficient(1e-10));
}

TEST_CASE("gmres on I3 with b = [3,0,0] converges in one step") {
  const GmresResult r = gmres(Matrix::identity(3), Vector{3, 0, 0}, Vector(3, 0.0));
  CHECK(r.termination == Termination::Breakdown);
  CHECK(r.breakdown_index == 1u);
  CHECK(r.steps() == 1);
  CHECK(r.x[0] == Approx(3.0));
  CHECK(r.x[1] == 0.0);
  CHECK(r.residual_norm == Approx(0.0));
}

TEST_CASE("gmres on diag(1,0), b = [1,1] breaks down at j = 2 at the LS minimum") {
  const Matrix a{{1, 0}, {0, 0}};
  const GmresResult r = gmres(a, Vector{1, 1}, Vector(2, 0.0));
  CHECK(r.termination == Termination::Breakdown);
  CHECK(r.breakdown_index == 2u);
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r.x[1]) < 1e-12);
  CHECK(r.residual_norm == Approx(1.0).epsilon(1e-12));
  // Oracle minimum of ||b - Ax|| over x is |b2| = 1.
  const Vector xo = min_norm_lstsq(a, Vector{1, 1});
  CHECK(testing::ref_norm(subtract(Vector{1, 1}, testing::ref_matvec(a, xo))) == Approx(r.residual_norm));
}

TEST_CASE("gmres on the 2x2 shift breaks down with h11 = 0 and fails to reach the LS minimum") {
  const Matrix a{{0, 1}, {0, 0}};
  const GmresResult r = gmres(a, Vector{1, 0}, Vector(2, 0.0));
  CHECK(r.termination == Termination::Breakdown);
  CHECK(r.breakdown_index == 1u);
  CHECK(r.hessenberg.hbar(0, 0) == 0.0);
  CHECK(r.residual_norm == Approx(1.0).epsilon(1e-12));
  const Vector xo = min_norm_lstsq(a, Vector{1, 0});
  CHECK(testing::ref_norm(subtract(Vector{1, 0}, testing::ref_matvec(a, xo))) < 1e-15);
}

TEST_CASE("gmres returns x0 when r0 = 0") {
  const Matrix a{{2, 1}, {0, 1}};
  const Vector x0{1, -1};
  const GmresResult r = gmres(a, testing::ref_matvec(a, x0), x0);
  CHECK(r.steps() == 0);
  CHECK(r.x == x0);
  CHECK(r.termination == Termination::ResidualTol);
  CHECK(r.trace.empty());
}

TEST_CASE("gmres honours max_iter") {
  SolverOptions o;
  o.max_iter = 2;
  const Matrix a = testing::gaussian(6, 6, 3);
  const GmresResult r = gmres(a, testing::gaussian_vector(6, 4), Vector(6, 0.0), o);
  CHECK(r.steps() == 2);
  CHECK(r.termination == Termination::MaxIter);
  CHECK(r.basis.size() == 3);
}

TEST_CASE("gmres normal-equation stop fires when enabled") {
  SolverOptions o;
  o.netol = 1e-8;
  const Matrix a{{1, 0, 0}, {0, 2, 0}, {0, 0, 0}};
  const GmresResult r = gmres(a, Vector{1, 1, 1}, Vector(3, 0.0), o);
  CHECK(r.termination == Termination::NormalEqTol);
  CHECK(r.trace.back().normal_eq_rel <= 1e-8);
}

TEST_CASE("gmres rejects bad input") {
  CHECK_THROWS_AS(gmres(Matrix(2, 3), Vector(2), Vector(3)), std::invalid_argument);
  CHECK_THROWS_AS(gmres(Matrix::identity(2), Vector(3), Vector(2)), std::invalid_argument);
  CHECK_THROWS_AS(gmres(Matrix::identity(2), Vector{1, std::numeric_limits<double>::infinity()}, Vector(2)),
                  std::invalid_argument);
}

TEST_CASE("termination names round trip") {
  for (auto t : {Termination::Breakdown, Termination::MaxIter, Termination::ResidualTol, Termination::NormalEqTol})
    CHECK(termination_from_string(to_string(t)) == t);
  CHECK_FALSE(termination_from_string("nope").has_value());
}

TEST_CASE("gmres invariants on random singular and nonsingular systems") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 3 + seed % 30;
    Rng rng(seed);
    Matrix a;
    if (seed % 2) {
      a = random_conditioned(n, 1e3, rng);
    } else {
      GenSpec s{n, 1 + seed % (n - 1), seed, 0.5, 1e3};
      a = gen_general_singular(s);
    }
    const Vector b = testing::gaussian_vector(n, seed + 7);
    const GmresResult r = gmres(a, b, Vector(n, 0.0));
    const double na = testing::ref_fro(a);
    CHECK(r.steps() <= n);
    for (std::size_t j = 1; j <= r.steps(); ++j) CHECK(arnoldi_relation_error(a, r, j) <= 1e-10 * na);
    CHECK(testing::ref_orth_error(r.basis.as_matrix()) <= 1e-10 * static_cast<double>(r.steps()));
    for (std::size_t i = 0; i < r.hessenberg.hbar.rows(); ++i)
      for (std::size_t j = 0; j + 1 < i && j < r.hessenberg.hbar.cols(); ++j) CHECK(r.hessenberg.hbar(i, j) == 0.0);
    double prev = r.hessenberg.beta;
    for (const auto& rec : r.trace) {
      CHECK(rec.h_next >= 0.0);
      CHECK(rec.residual_estimate <= prev * (1 + 1e-12));
      prev = rec.residual_estimate;
    }
    if (r.termination == Termination::Breakdown) CHECK(r.trace.back().h_next <= 1e-12 * na);
    if (seed % 2) CHECK(testing::ref_norm(subtract(b, testing::ref_matvec(a, r.x))) <= 1e-8 * testing::ref_norm(b));
  }
}
