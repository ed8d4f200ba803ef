#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sgmres {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Builds a matrix whose j-th column is cols[j]; all columns share a length.
  static Matrix from_columns(std::span<const Vector> cols, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);

  /// Columns [first, first + count).
  Matrix column_block(std::size_t first, std::size_t count) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double frobenius_norm(const Matrix& a);
bool all_finite(std::span<const double> x);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
Vector scaled(double alpha, std::span<const double> x);

Vector matvec(const Matrix& a, std::span<const double> x);
/// A^T x
Vector matvec_transposed(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix subtract(const Matrix& a, const Matrix& b);

/// ||A^T A - I||_F, the departure of the columns of A from orthonormality.
double orthonormality_error(const Matrix& a);

struct SvdFactors {
  Matrix u;      // rows x rows
  Vector sigma;  // min(rows, cols), nonincreasing
  Matrix v;      // cols x cols
};

/// One-sided Jacobi SVD. U and V are completed to full orthogonal matrices.
/// Singular values are sorted nonincreasing (stable for ties) and each left
/// singular vector has its first nonzero entry nonnegative.
SvdFactors svd(const Matrix& a);

/// Singular values only, nonincreasing.
Vector singular_values(const Matrix& a);

inline constexpr double default_tol_rank = 1e-10;

/// #{i : sigma_i > tol_rank * sigma_1}, 0 when sigma_1 = 0.
std::size_t numerical_rank(std::span<const double> sigma, double tol_rank = default_tol_rank);
std::size_t numerical_rank(const SvdFactors& f, double tol_rank = default_tol_rank);

/// Minimum-norm least squares solution A^+ b with the pseudoinverse
/// truncated at tol_rank * sigma_1.
Vector min_norm_lstsq(const Matrix& a, std::span<const double> b,
                      double tol_rank = default_tol_rank);
Vector min_norm_lstsq(const Matrix& a, const SvdFactors& f, std::span<const double> b,
                      double tol_rank = default_tol_rank);

struct QrFactors {
  Matrix q;  // rows x cols, orthonormal columns
  Matrix r;  // cols x cols, upper triangular with nonnegative diagonal
};

/// Thin Householder QR; requires rows >= cols.
QrFactors householder_qr(const Matrix& m);

}  // namespace sgmres
