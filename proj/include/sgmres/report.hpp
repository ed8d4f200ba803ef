#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgmres/gmres.hpp"
#include "sgmres/linalg.hpp"

namespace sgmres {

inline constexpr std::string_view tool_name = "sgmres";
inline constexpr std::string_view tool_version = "0.1.0";
/// Tolerance handed to certify_least_squares by solve and diagnose.
inline constexpr double default_certificate_tol = 1e-8;

struct ReportInput {
  std::size_t n = 0;
  std::size_t r = 0;
  double a12_rel = 0.0;
  bool consistent = false;
  std::string source;  // "file:<path>" or "generate:<family>"
  std::optional<std::uint64_t> seed;

  bool operator==(const ReportInput&) const = default;
};

struct ReportSettings {
  double tol_breakdown = 0.0;
  double tol_rank = 0.0;
  double rtol = 0.0;
  double netol = 0.0;
  std::optional<std::size_t> max_iter;
  bool reorthogonalize = true;
  double tol_range_symmetric = 0.0;
  double certificate_tol = default_certificate_tol;

  bool operator==(const ReportSettings&) const = default;
};

struct ReportIteration {
  std::size_t j = 0;
  double h_next = 0.0;
  double residual_estimate = 0.0;
  double residual = 0.0;
  std::optional<std::size_t> rank_v1;    // diagnose only
  std::optional<double> parallel_sin;  // diagnose only; null when v^2_j is absent

  bool operator==(const ReportIteration&) const = default;
};

/// Fields not computed by a command are serialized as null.
struct ReportVerdicts {
  bool is_ls = false;
  double normal_eq_rel = 0.0;
  double residual = 0.0;
  double oracle_residual = 0.0;
  double gap = 0.0;
  double residual_floor = 0.0;
  std::string termination;
  std::size_t steps = 0;
  std::optional<std::size_t> breakdown_index;
  bool bound_r_plus_1 = false;  // steps <= r + 1

  std::optional<double> equivalence_error;
  std::optional<bool> equivalence_same_steps;
  std::optional<double> residual_split_error;  // max over iterates, relative to ||b||^2 + 1
  std::optional<bool> rank_profile_pass;
  std::optional<double> max_parallel_sin;
  std::optional<bool> a11_nonsingular;
  std::optional<bool> range_null_trivial;
  std::optional<bool> a12_zero;
  std::optional<bool> structure_equivalence;  // a11_nonsingular == range_null_trivial
  std::optional<bool> structure_implication;  // a12_zero implies a11_nonsingular

  bool operator==(const ReportVerdicts&) const = default;
};

struct DiagnosticReport {
  std::string tool{tool_name};
  std::string version{tool_version};
  std::string command;
  ReportInput input;
  ReportSettings settings;
  std::vector<ReportIteration> iterations;
  ReportVerdicts verdicts;

  bool operator==(const DiagnosticReport&) const = default;
};

nlohmann::ordered_json to_json(const DiagnosticReport& report);
/// Throws nlohmann::json::exception on a missing or mistyped field.
DiagnosticReport report_from_json(const nlohmann::ordered_json& j);

/// Pretty-printed JSON with every real at 17 significant digits.
std::string dump_json(const nlohmann::ordered_json& j);
std::string serialize_report(const DiagnosticReport& report);
DiagnosticReport parse_report(std::string_view text);

/// One linear system plus how it was obtained.
struct Problem {
  Matrix a;
  Vector b;
  Vector x0;
  std::string source;
  std::optional<std::uint64_t> seed;
};

enum class Family { RangeSymmetric, General, Nilpotent, Nonsingular };

std::string_view to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);

struct GenerateRequest {
  Family family = Family::RangeSymmetric;
  std::size_t n = 10;
  std::optional<std::size_t> rank;  // n / 2 (at least 1) when unset
  double a12 = 1.0;                 // general family only
  bool consistent = false;
  std::uint64_t seed = 0;
  double cond_cap = 1e3;
};

/// Builds A, b and x0 = 0. The nilpotent family always uses b = e_1.
Problem generate_problem(const GenerateRequest& req);

struct CommandOutcome {
  DiagnosticReport report;
  int exit_code = 0;  // 0 certified, 3 not certified
};

CommandOutcome run_solve(const Problem& p, const SolverOptions& opts,
                         double certificate_tol = default_certificate_tol);
/// Adds the decomposed run and the structural checks. Throws
/// std::domain_error when A is numerically zero.
CommandOutcome run_diagnose(const Problem& p, const SolverOptions& opts,
                            double certificate_tol = default_certificate_tol);

}  // namespace sgmres
