#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sgmres/linalg.hpp"

namespace sgmres {

/// Malformed input; line() is 1-based, 0 when not tied to a line.
class MatrixMarketError : public std::runtime_error {
 public:
  MatrixMarketError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class MmFormat { Array, Coordinate };

/// Reads "matrix array|coordinate real|integer general".
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market_file(const std::filesystem::path& path);

/// Values are written with 17 significant digits.
void write_matrix_market(std::ostream& out, const Matrix& a, MmFormat format = MmFormat::Array);
void write_matrix_market_file(const std::filesystem::path& path, const Matrix& a,
                              MmFormat format = MmFormat::Array);

/// Accepts a Matrix Market n x 1 (or 1 x n) matrix, or a bare whitespace
/// separated list of reals.
Vector read_vector(std::istream& in);
Vector read_vector_file(const std::filesystem::path& path);
void write_vector(std::ostream& out, std::span<const double> v);
void write_vector_file(const std::filesystem::path& path, std::span<const double> v);

/// %.17g
std::string format_real(double x);

}  // namespace sgmres
