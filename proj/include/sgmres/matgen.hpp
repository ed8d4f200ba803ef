#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "sgmres/linalg.hpp"
#include "sgmres/range_decomposition.hpp"

namespace sgmres {

/// Seeded sampler. std::mt19937_64 output is fixed by the standard; the
/// double and normal transforms here are explicit so corpora are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  Vector normal_vector(std::size_t n);
  Matrix normal_matrix(std::size_t rows, std::size_t cols);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Derives an independent seed for sub-stream `stream` (splitmix64 finalizer).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

struct GenSpec {
  std::size_t n = 0;
  std::size_t r = 0;
  std::uint64_t seed = 0;
  double a12_scale = 0.0;
  double cond_cap = 1e3;

  /// Throws std::invalid_argument unless 1 <= r <= n, a12_scale >= 0, cond_cap >= 1.
  void validate() const;
};

struct GeneratedMatrix {
  Matrix a;
  Matrix q;  // the orthogonal [Q1, Q2] used in the construction
  Matrix a11;
  Matrix a12;
};

/// Haar-like orthogonal matrix from the QR of a Gaussian matrix.
Matrix random_orthogonal(std::size_t n, Rng& rng);
/// U diag(s) W^T with max s = 1 and min s >= 1 / cond_cap.
Matrix random_conditioned(std::size_t r, double cond_cap, Rng& rng);

/// Q [A11 A12; 0 0] Q^T
Matrix assemble_block_matrix(const Matrix& q, const Matrix& a11, const Matrix& a12);

/// Block construction with ||A12||_F = a12_scale * ||A11||_F.
GeneratedMatrix generate_singular(const GenSpec& spec);

/// A = Q1 A11 Q1^T, so R(A) = R(A^T).
Matrix gen_range_symmetric(const GenSpec& spec);
/// Same draws as gen_range_symmetric plus an A12 block of the requested size.
Matrix gen_general_singular(const GenSpec& spec);

/// Ones on the superdiagonal; n >= 2.
Matrix shift_nilpotent(std::size_t n);

/// Consistent: b = A w. Inconsistent: b = A w + Q2 z with ||Q2 z|| >= 0.1 ||b||.
Vector gen_rhs(const Matrix& a, const RangeBasis& basis, bool consistent, std::uint64_t seed);

Vector random_vector(std::size_t n, std::uint64_t seed);

}  // namespace sgmres
