#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgmres/gmres.hpp"

namespace sgmres {

enum class VerifyFamily { All, RangeSymmetric, General };

std::string_view to_string(VerifyFamily f);
std::optional<VerifyFamily> verify_family_from_string(std::string_view s);

struct VerifyConfig {
  std::size_t trials = 200;
  std::size_t min_n = 3;
  std::size_t max_n = 40;
  std::uint64_t seed = 1;
  VerifyFamily family = VerifyFamily::All;
  /// Fixed ||A12||_F / ||A11||_F for general trials; cycles 0.1, 1, 10 when unset.
  std::optional<double> a12;
  std::size_t pairs = 5;  // (b, x0) pairs per matrix
  double cond_cap = 1e3;
  SolverOptions opts;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

struct PropertyTally {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool required = true;
  /// Largest measured value divided by its tolerance; unset for yes/no checks.
  std::optional<double> worst_ratio;

  bool pass() const noexcept { return !required || violations == 0; }
};

struct VerifySummary {
  std::vector<PropertyTally> properties;
  std::size_t trials = 0;
  std::size_t runs = 0;

  bool all_pass() const noexcept;
};

/// Runs every property over seeded generated trials. Results do not depend on
/// the thread count.
VerifySummary run_verify(const VerifyConfig& config);

std::string format_summary(const VerifySummary& summary);

/// THREADS from the environment, if set to a positive integer.
std::optional<std::size_t> threads_from_env();

}  // namespace sgmres
