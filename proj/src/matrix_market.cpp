#include "sgmres/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace sgmres {

MatrixMarketError::MatrixMarketError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '%';
}

double parse_real(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw MatrixMarketError(line, "invalid real value '" + tok + "'");
  if (!std::isfinite(v)) throw MatrixMarketError(line, "non-finite value '" + tok + "'");
  return v;
}

std::size_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw MatrixMarketError(line, std::string("invalid ") + what + " '" + tok + "'");
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line; false at end of input.
  bool next_data(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (is_skippable(line)) continue;
      tokens = split_ws(line);
      return true;
    }
    return false;
  }
  bool next_raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

struct Header {
  MmFormat format = MmFormat::Array;
};

Header parse_banner(const std::string& line) {
  const auto tok = split_ws(line);
  if (tok.empty() || tok[0] != "%%MatrixMarket")
    throw MatrixMarketError(1, "missing %%MatrixMarket banner");
  if (tok.size() != 5) throw MatrixMarketError(1, "banner must have 5 fields");
  if (lower(tok[1]) != "matrix") throw MatrixMarketError(1, "unsupported object '" + tok[1] + "'");
  Header h;
  const auto fmt = lower(tok[2]);
  if (fmt == "array")
    h.format = MmFormat::Array;
  else if (fmt == "coordinate")
    h.format = MmFormat::Coordinate;
  else
    throw MatrixMarketError(1, "unsupported format '" + tok[2] + "'");
  const auto field = lower(tok[3]);
  if (field != "real" && field != "integer" && field != "double")
    throw MatrixMarketError(1, "unsupported field '" + tok[3] + "'");
  if (lower(tok[4]) != "general") throw MatrixMarketError(1, "unsupported symmetry '" + tok[4] + "'");
  return h;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  LineReader reader(in);
  std::string banner;
  if (!reader.next_raw(banner)) throw MatrixMarketError(1, "empty input");
  const Header h = parse_banner(banner);

  std::vector<std::string> tok;
  if (!reader.next_data(tok)) throw MatrixMarketError(reader.line_no(), "missing size line");
  const std::size_t size_line = reader.line_no();
  const std::size_t expected_fields = h.format == MmFormat::Array ? 2 : 3;
  if (tok.size() != expected_fields)
    throw MatrixMarketError(size_line, "size line must have " + std::to_string(expected_fields) + " fields");
  const std::size_t rows = parse_count(tok[0], size_line, "row count");
  const std::size_t cols = parse_count(tok[1], size_line, "column count");
  if (rows == 0 || cols == 0) throw MatrixMarketError(size_line, "dimensions must be positive");

  Matrix a(rows, cols);
  if (h.format == MmFormat::Array) {
    const std::size_t total = rows * cols;
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (!reader.next_data(tok))
        throw MatrixMarketError(reader.line_no(), "expected " + std::to_string(total) +
                                                      " values, found " + std::to_string(idx));
      if (tok.size() != 1) throw MatrixMarketError(reader.line_no(), "expected one value per line");
      a(idx % rows, idx / rows) = parse_real(tok[0], reader.line_no());
    }
  } else {
    const std::size_t nnz = parse_count(tok[2], size_line, "entry count");
    if (nnz > rows * cols) throw MatrixMarketError(size_line, "entry count exceeds matrix size");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!reader.next_data(tok))
        throw MatrixMarketError(reader.line_no(), "expected " + std::to_string(nnz) +
                                                      " entries, found " + std::to_string(e));
      const std::size_t ln = reader.line_no();
      if (tok.size() != 3) throw MatrixMarketError(ln, "coordinate entry must have 3 fields");
      const std::size_t i = parse_count(tok[0], ln, "row index");
      const std::size_t j = parse_count(tok[1], ln, "column index");
      if (i < 1 || i > rows || j < 1 || j > cols) throw MatrixMarketError(ln, "index out of range");
      if (!seen.emplace(i, j).second) throw MatrixMarketError(ln, "duplicate entry");
      a(i - 1, j - 1) = parse_real(tok[2], ln);
    }
  }
  if (reader.next_data(tok)) throw MatrixMarketError(reader.line_no(), "unexpected trailing data");
  return a;
}

Matrix read_matrix_market_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError(0, "cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& a, MmFormat format) {
  if (format == MmFormat::Array) {
    out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t i = 0; i < a.rows(); ++i) out << format_real(a(i, j)) << '\n';
    return;
  }
  std::size_t nnz = 0;
  for (double v : a.data()) nnz += v != 0.0;
  out << "%%MatrixMarket matrix coordinate real general\n"
      << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << format_real(a(i, j)) << '\n';
}

void write_matrix_market_file(const std::filesystem::path& path, const Matrix& a, MmFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_market(out, a, format);
}

Vector read_vector(std::istream& in) {
  if (in.peek() == '%') {
    const Matrix m = read_matrix_market(in);
    if (m.cols() != 1 && m.rows() != 1)
      throw MatrixMarketError(0, "vector file must hold a single row or column");
    return Vector(m.data().begin(), m.data().end());
  }
  Vector v;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_skippable(line)) continue;
    for (const auto& t : split_ws(line)) v.push_back(parse_real(t, ln));
  }
  if (v.empty()) throw MatrixMarketError(ln, "vector file holds no values");
  return v;
}

Vector read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError(0, "cannot open " + path.string());
  return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> v) {
  Matrix m(v.size(), 1);
  m.set_column(0, v);
  write_matrix_market(out, m);
}

void write_vector_file(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_vector(out, v);
}

}  // namespace sgmres
