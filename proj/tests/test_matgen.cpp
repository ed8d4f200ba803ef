#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sgmres/matgen.hpp"
#include "support.hpp"

using namespace sgmres;
using doctest::Approx;

namespace {

double residual_floor_like(const Vector& b, const RangeBasis& basis) {
  return testing::ref_norm(testing::ref_matvec(testing::ref_transpose(basis.q2), b));
}

}  // namespace

TEST_CASE("Rng wraps the standard mt19937_64 stream") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  std::mt19937_64 ref;
  ref.discard(9999);
  CHECK(ref() == 9981545732273789042ULL);

  Rng a(5489), b(5489);
  std::mt19937_64 eng(5489);
  const double u = a.uniform();
  CHECK(u == static_cast<double>(eng() >> 11) * 0x1.0p-53);
  CHECK(b.uniform() == u);
}

TEST_CASE("Rng normals have the right moments") {
  Rng rng(7);
  const std::size_t n = 200000;
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
}

TEST_CASE("split_seed separates streams deterministically") {
  CHECK(split_seed(1, 0) == split_seed(1, 0));
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
}

TEST_CASE("GenSpec validation") {
  CHECK_THROWS_AS(generate_singular({3, 0, 1, 0.0, 1e3}), std::invalid_argument);
  CHECK_THROWS_AS(generate_singular({3, 4, 1, 0.0, 1e3}), std::invalid_argument);
  CHECK_THROWS_AS(generate_singular({3, 1, 1, -1.0, 1e3}), std::invalid_argument);
  CHECK_THROWS_AS(generate_singular({3, 1, 1, 0.0, 0.5}), std::invalid_argument);
}

TEST_CASE("block assembly with Q = I") {
  CHECK(assemble_block_matrix(Matrix::identity(2), Matrix{{2.5}}, Matrix{{0}}) == Matrix{{2.5, 0}, {0, 0}});
  CHECK(assemble_block_matrix(Matrix::identity(2), Matrix{{1}}, Matrix{{1}}) == Matrix{{1, 1}, {0, 0}});
}

TEST_CASE("random_conditioned respects the condition cap") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const std::size_t r = 1 + seed * 3 % 30;
    const Matrix m = random_conditioned(r, 1e3, rng);
    const Vector s = testing::ref_singular_values(m);
    CHECK(s.front() == Approx(1.0).epsilon(1e-10));
    CHECK(s.back() >= 1e-3 * (1 - 1e-8));
  }
}

TEST_CASE("range-symmetric output annihilates Q2 on both sides") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 30, r = 1 + seed % (n - 1);
    const GeneratedMatrix g = generate_singular({n, r, seed, 0.0, 1e3});
    const Matrix q2 = g.q.column_block(r, n - r);
    const double na = testing::ref_fro(g.a);
    CHECK(testing::ref_fro(testing::ref_matmul(g.a, q2)) <= 1e-12 * na);
    CHECK(testing::ref_fro(testing::ref_matmul(testing::ref_transpose(q2), g.a)) <= 1e-12 * na);
    CHECK(numerical_rank(svd(g.a)) == r);
    CHECK(is_range_symmetric(g.a, 1e-10).flag);
    CHECK(gen_range_symmetric({n, r, seed, 0.0, 1e3}) == g.a);
  }
}

TEST_CASE("general output has the requested A12 scale and is not range symmetric") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 3 + seed % 30, r = 1 + seed % (n - 1);
    for (double scale : {0.1, 1.0, 10.0}) {
      const GeneratedMatrix g = generate_singular({n, r, seed, scale, 1e3});
      CHECK(testing::ref_fro(g.a12) == Approx(scale * testing::ref_fro(g.a11)).epsilon(1e-12));
      CHECK(numerical_rank(svd(g.a)) == r);
      CHECK_FALSE(is_range_symmetric(g.a, 1e-10).flag);
    }
    CHECK(gen_general_singular({n, r, seed, 0.0, 1e3}) == gen_range_symmetric({n, r, seed, 0.0, 1e3}));
  }
}

TEST_CASE("generators are deterministic") {
  CHECK(gen_general_singular({12, 5, 99, 1.0, 1e3}) == gen_general_singular({12, 5, 99, 1.0, 1e3}));
  CHECK_FALSE(gen_general_singular({12, 5, 99, 1.0, 1e3}) == gen_general_singular({12, 5, 100, 1.0, 1e3}));
  CHECK(random_vector(7, 3) == random_vector(7, 3));
}

TEST_CASE("shift_nilpotent") {
  CHECK(shift_nilpotent(2) == Matrix{{0, 1}, {0, 0}});
  CHECK(numerical_rank(svd(shift_nilpotent(5))) == 4);
  CHECK_THROWS_AS(shift_nilpotent(1), std::invalid_argument);
}

TEST_CASE("gen_rhs consistency contracts") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 3 + seed % 30, r = 1 + seed % (n - 1);
    const Matrix a = gen_general_singular({n, r, seed, 1.0, 1e3});
    const RangeBasis basis = range_basis(a);
    const Vector bc = gen_rhs(a, basis, true, seed);
    CHECK(residual_floor_like(bc, basis) <= 1e-10 * testing::ref_norm(bc));
    const Vector bi = gen_rhs(a, basis, false, seed);
    CHECK(residual_floor_like(bi, basis) >= 0.1 * testing::ref_norm(bi) - 1e-10);
    CHECK(gen_rhs(a, basis, false, seed) == bi);
  }
  const Matrix full = Matrix::identity(3);
  CHECK_THROWS_AS(gen_rhs(full, range_basis(full), false, 1), std::invalid_argument);
}
