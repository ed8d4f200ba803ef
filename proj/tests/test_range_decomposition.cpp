#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sgmres/matgen.hpp"
#include "sgmres/range_decomposition.hpp"
#include "support.hpp"

using namespace sgmres;
using doctest::Approx;

namespace {

Matrix symmetric(std::size_t n, std::uint64_t seed) {
  const Matrix g = testing::gaussian(n, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = g(i, j) + g(j, i);
  return s;
}

Matrix skew(std::size_t n, std::uint64_t seed) {
  const Matrix g = testing::gaussian(n, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = g(i, j) - g(j, i);
  return s;
}

// Symmetric of rank r: G D G^T with a rank-r factor.
Matrix symmetric_rank(std::size_t n, std::size_t r, std::uint64_t seed) {
  const Matrix g = testing::gaussian(n, r, seed);
  return testing::ref_matmul(g, testing::ref_transpose(g));
}

}  // namespace

TEST_CASE("range_basis of diag(1,0)") {
  const RangeBasis b = range_basis(Matrix{{1, 0}, {0, 0}});
  CHECK(b.r == 1);
  CHECK(std::abs(b.q1(0, 0)) == Approx(1.0));
  CHECK(std::abs(b.q2(1, 0)) == Approx(1.0));
}

TEST_CASE("range_basis of the shift spans e1") {
  const RangeBasis b = range_basis(Matrix{{0, 1}, {0, 0}});
  CHECK(b.r == 1);
  CHECK(std::abs(b.q1(0, 0)) == Approx(1.0));
  CHECK(std::abs(b.q1(1, 0)) < 1e-15);
  CHECK(std::abs(b.q2(1, 0)) == Approx(1.0));
}

TEST_CASE("range_basis of I3 has an empty complement") {
  const RangeBasis b = range_basis(Matrix::identity(3));
  CHECK(b.r == 3);
  CHECK(b.q2.cols() == 0);
}

TEST_CASE("range_basis rejects the zero matrix") {
  CHECK_THROWS_AS(range_basis(Matrix(3, 3)), std::domain_error);
  CHECK_THROWS_AS(range_basis(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("range_basis invariants on random low-rank matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 3 + seed % 25;
    const std::size_t r = 1 + seed % (n - 1);
    const Matrix a = testing::ref_matmul(testing::gaussian(n, r, seed), testing::gaussian(r, n, seed + 50));
    const RangeBasis b = range_basis(a);
    CHECK(b.r == r);
    CHECK(testing::ref_orth_error(b.q()) <= 1e-10 * n);
    // (I - Q1 Q1^T) A
    const Matrix proj = testing::ref_matmul(b.q1, testing::ref_matmul(testing::ref_transpose(b.q1), a));
    CHECK(testing::ref_fro_diff(a, proj) <= 1e-8 * testing::ref_fro(a));
    CHECK(decompose_matrix(a, b).residual_lower_block_norm <= 1e-10 * testing::ref_fro(a));
  }
}

TEST_CASE("decompose_matrix examples") {
  const Matrix d{{1, 0}, {0, 0}};
  const DecomposedMatrix dd = decompose_matrix(d, range_basis(d));
  CHECK(dd.a11(0, 0) == Approx(1.0));
  CHECK(dd.a12(0, 0) == Approx(0.0));

  const Matrix s{{0, 1}, {0, 0}};
  const DecomposedMatrix ds = decompose_matrix(s, range_basis(s));
  CHECK(std::abs(ds.a11(0, 0)) < 1e-15);
  CHECK(std::abs(ds.a12(0, 0)) == Approx(1.0));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = symmetric_rank(9, 4, seed);
    CHECK(testing::ref_fro(decompose_matrix(a, range_basis(a)).a12) <= 1e-10 * testing::ref_fro(a));
  }
  CHECK_THROWS_AS(decompose_matrix(Matrix::identity(3), range_basis(d)), std::invalid_argument);
}

TEST_CASE("is_range_symmetric examples") {
  CHECK(is_range_symmetric(symmetric(7, 3), 1e-10).flag);
  CHECK(is_range_symmetric(symmetric_rank(7, 3, 4), 1e-10).flag);
  const RangeSymmetry s = is_range_symmetric(Matrix{{0, 1}, {0, 0}}, 1e-10);
  CHECK_FALSE(s.flag);
  CHECK(s.a12_rel == Approx(1.0));
  CHECK(is_range_symmetric(skew(6, 5), 1e-10).flag);
  // Odd-order skew matrices are singular.
  CHECK(is_range_symmetric(skew(7, 6), 1e-10).flag);
}

TEST_CASE("structure theorems on small examples") {
  const TheoremVerdicts d = check_structure_theorems(Matrix{{1, 0}, {0, 0}}, 1e-10);
  CHECK(d.a11_nonsingular);
  CHECK(d.range_null_trivial);
  CHECK(d.a12_zero);

  const TheoremVerdicts s = check_structure_theorems(Matrix{{0, 1}, {0, 0}}, 1e-10);
  CHECK_FALSE(s.a11_nonsingular);
  CHECK_FALSE(s.range_null_trivial);
  CHECK_FALSE(s.a12_zero);
  CHECK(s.equivalence_holds());
  CHECK(s.implication_holds());

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix q = testing::ref_orthogonal(2, seed);
    const Matrix a = testing::ref_matmul(testing::ref_matmul(q, Matrix{{1, 1}, {0, 0}}), testing::ref_transpose(q));
    const TheoremVerdicts v = check_structure_theorems(a, 1e-10);
    CHECK(v.a11_nonsingular);
    CHECK(v.range_null_trivial);
    CHECK_FALSE(v.a12_zero);
  }
}

TEST_CASE("structure theorems hold on generated families") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t n = 3 + seed % 20;
    const std::size_t r = 1 + seed % (n - 1);
    const TheoremVerdicts rs = check_structure_theorems(gen_range_symmetric({n, r, seed, 0.0, 1e3}), 1e-10);
    CHECK(rs.a11_nonsingular);
    CHECK(rs.range_null_trivial);
    CHECK(rs.a12_zero);
    const TheoremVerdicts g = check_structure_theorems(gen_general_singular({n, r, seed, 1.0, 1e3}), 1e-10);
    CHECK(g.equivalence_holds());
    CHECK(g.implication_holds());
    CHECK_FALSE(g.a12_zero);
  }
  for (std::size_t n = 2; n <= 6; ++n) {
    const TheoremVerdicts s = check_structure_theorems(shift_nilpotent(n), 1e-10);
    CHECK(s.equivalence_holds());
    CHECK(s.implication_holds());
  }
}

TEST_CASE("decompose_vector and recompose") {
  const Matrix d{{1, 0}, {0, 0}};
  const RangeBasis b = range_basis(d);
  const SplitVector s = decompose_vector(Vector{1, 1}, b);
  CHECK(std::abs(s.v1[0]) == Approx(1.0));
  CHECK(std::abs(s.v2[0]) == Approx(1.0));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix a = symmetric_rank(10, 4, seed);
    const RangeBasis basis = range_basis(a);
    const Vector v = testing::gaussian_vector(10, seed + 9);
    const SplitVector sv = decompose_vector(v, basis);
    const Vector back = recompose(sv.v1, sv.v2, basis);
    CHECK(testing::ref_norm(subtract(back, v)) <= 1e-12 * testing::ref_norm(v));
    const double n1 = testing::ref_norm(sv.v1), n2 = testing::ref_norm(sv.v2), nv = testing::ref_norm(v);
    CHECK(std::abs(n1 * n1 + n2 * n2 - nv * nv) <= 1e-12 * nv * nv);
    const Vector in_range = testing::ref_matvec(a, v);
    CHECK(testing::ref_norm(decompose_vector(in_range, basis).v2) <= 1e-10 * testing::ref_norm(in_range));
  }
  CHECK_THROWS_AS(decompose_vector(Vector{1, 2, 3}, b), std::invalid_argument);
  CHECK_THROWS_AS(recompose(Vector{1, 2}, Vector{1}, b), std::invalid_argument);
}

TEST_CASE("||A12||_F does not depend on the choice of basis") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 6 + seed % 10, r = 2 + seed % (n - 3);
    const Matrix a = gen_general_singular({n, r, seed, 2.0, 1e3});
    const RangeBasis b = range_basis(a);
    // Rotate both blocks by independent random orthogonal matrices.
    RangeBasis rot{testing::ref_matmul(b.q1, testing::ref_orthogonal(r, seed + 1)),
                   testing::ref_matmul(b.q2, testing::ref_orthogonal(n - r, seed + 2)), r};
    const double x = testing::ref_fro(decompose_matrix(a, b).a12);
    const double y = testing::ref_fro(decompose_matrix(a, rot).a12);
    CHECK(std::abs(x - y) <= 1e-9 * testing::ref_fro(a));
  }
}

TEST_CASE("residual splits into range and complement parts") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 5 + seed % 10, r = 1 + seed % (n - 1);
    const Matrix a = gen_general_singular({n, r, seed, 1.0, 1e3});
    const RangeBasis basis = range_basis(a);
    const DecomposedMatrix d = decompose_matrix(a, basis);
    const Vector b = testing::gaussian_vector(n, seed + 3);
    const Vector x = testing::gaussian_vector(n, seed + 4);
    const SplitVector sb = decompose_vector(b, basis), sx = decompose_vector(x, basis);
    Vector r1 = subtract(sb.v1, testing::ref_matvec(d.a11, sx.v1));
    r1 = subtract(r1, testing::ref_matvec(d.a12, sx.v2));
    const double lhs = std::pow(testing::ref_norm(subtract(b, testing::ref_matvec(a, x))), 2);
    const double rhs = std::pow(testing::ref_norm(r1), 2) + std::pow(testing::ref_norm(sb.v2), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
  }
}
