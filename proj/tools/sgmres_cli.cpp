// sgmres: solve, diagnose and verify GMRES runs on possibly singular systems.
//
// Exit codes: 0 least-squares solution certified (verify: every property
// holds), 3 not certified (verify: a property failed), 2 usage or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgmres/matgen.hpp"
#include "sgmres/matrix_market.hpp"
#include "sgmres/property_suite.hpp"
#include "sgmres/report.hpp"

namespace {

using namespace sgmres;

constexpr int exit_usage = 2;

struct SolverFlags {
  double tol_breakdown = 1e-12;
  double tol_rank = default_tol_rank;
  double rtol = 1e-12;
  double netol = 0.0;
  std::optional<std::size_t> max_iter;

  void add(CLI::App& app) {
    app.add_option("--tol-breakdown", tol_breakdown, "breakdown when h(j+1,j) <= tol * ||A||_F")
        ->capture_default_str();
    app.add_option("--tol-rank", tol_rank, "relative singular value cutoff for numerical rank")
        ->capture_default_str();
    app.add_option("--rtol", rtol, "stop when the residual estimate <= rtol * ||r0||")->capture_default_str();
    app.add_option("--netol", netol, "stop when ||A^T r|| <= netol * ||A||_F * ||r|| (0: off)")->capture_default_str();
    app.add_option("--max-iter", max_iter, "iteration cap (default: n)");
  }
  SolverOptions options() const {
    SolverOptions o;
    o.tol_breakdown = tol_breakdown;
    o.tol_rank = tol_rank;
    o.rtol = rtol;
    o.netol = netol;
    o.max_iter = max_iter;
    return o;
  }
};

struct ProblemFlags {
  std::string matrix;
  std::string rhs;
  std::string x0;
  std::string generate;
  std::size_t n = 10;
  std::optional<std::size_t> rank;
  double a12 = 1.0;
  bool consistent = false;
  bool inconsistent = false;
  std::uint64_t seed = 0;
  double cond_cap = 1e3;

  void add(CLI::App& app) {
    auto* m = app.add_option("--matrix", matrix, "Matrix Market file holding A");
    auto* r = app.add_option("--rhs", rhs, "right-hand side (Matrix Market or plain list)");
    app.add_option("--x0", x0, "initial guess (default: zero)");
    auto* g = app.add_option("--generate", generate, "generated family")
                  ->check(CLI::IsMember({"range-symmetric", "general", "nilpotent", "nonsingular"}));
    g->excludes(m)->excludes(r);
    app.add_option("--n", n, "generated dimension")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--rank", rank, "generated rank (default: n/2)");
    app.add_option("--a12", a12, "||A12||_F / ||A11||_F for the general family")->capture_default_str();
    auto* c = app.add_flag("--consistent", consistent, "generate b in R(A)");
    app.add_flag("--inconsistent", inconsistent, "generate b outside R(A) (default)")->excludes(c);
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_option("--cond-cap", cond_cap, "condition cap of the generated A11")->capture_default_str();
  }

  bool generating() const { return !generate.empty(); }

  GenerateRequest request() const {
    GenerateRequest req;
    req.family = *family_from_string(generate);
    req.n = n;
    req.rank = rank;
    req.a12 = a12;
    req.consistent = consistent;
    req.seed = seed;
    req.cond_cap = cond_cap;
    return req;
  }

  Problem load() const {
    Problem p;
    if (generating()) {
      p = generate_problem(request());
    } else {
      if (matrix.empty()) throw CLI::ValidationError("--matrix", "required unless --generate is given");
      if (rhs.empty()) throw CLI::ValidationError("--rhs", "required unless --generate is given");
      p.a = read_input_matrix(matrix);
      p.b = read_input_vector(rhs);
      p.source = "file:" + matrix;
      p.x0.assign(p.a.rows(), 0.0);
    }
    if (!x0.empty()) p.x0 = read_input_vector(x0);
    return p;
  }

  static Matrix read_input_matrix(const std::string& path) {
    try {
      return read_matrix_market_file(path);
    } catch (const MatrixMarketError& e) {
      throw MatrixMarketError(0, path + ": " + e.what());
    }
  }
  static Vector read_input_vector(const std::string& path) {
    try {
      return read_vector_file(path);
    } catch (const MatrixMarketError& e) {
      throw MatrixMarketError(0, path + ": " + e.what());
    }
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::ordered_json summary_json(const VerifySummary& s, const VerifyConfig& cfg) {
  nlohmann::ordered_json j;
  j["tool"] = std::string(tool_name);
  j["version"] = std::string(tool_version);
  j["command"] = "verify";
  j["config"] = {{"trials", cfg.trials},          {"min_n", cfg.min_n},
                 {"max_n", cfg.max_n},            {"seed", cfg.seed},
                 {"family", std::string(to_string(cfg.family))},
                 {"a12", cfg.a12 ? nlohmann::ordered_json(*cfg.a12) : nlohmann::ordered_json(nullptr)},
                 {"pairs", cfg.pairs},            {"cond_cap", cfg.cond_cap}};
  nlohmann::ordered_json props = nlohmann::ordered_json::array();
  for (const auto& p : s.properties)
    props.push_back({{"name", p.name},
                     {"checks", p.checks},
                     {"violations", p.violations},
                     {"required", p.required},
                     {"worst_ratio", p.worst_ratio ? nlohmann::ordered_json(*p.worst_ratio)
                                                   : nlohmann::ordered_json(nullptr)}});
  j["properties"] = std::move(props);
  j["runs"] = s.runs;
  j["all_pass"] = s.all_pass();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GMRES on possibly singular systems, with range-decomposition diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version));

  SolverFlags solver;
  ProblemFlags problem;
  std::string report_path;

  auto* solve = app.add_subcommand("solve", "run GMRES and certify the result");
  auto* diagnose = app.add_subcommand("diagnose", "solve plus decomposed run and structural checks");
  for (auto* sub : {solve, diagnose}) {
    solver.add(*sub);
    problem.add(*sub);
    sub->add_option("--report", report_path, "write the JSON report here (default: stdout)");
  }

  VerifyConfig vcfg;
  std::string vfamily = "all";
  std::optional<double> va12;
  std::optional<std::size_t> vthreads;
  SolverFlags vsolver;
  auto* verify = app.add_subcommand("verify", "run the property suite over generated trials");
  verify->add_option("--trials", vcfg.trials, "number of generated matrices")->capture_default_str();
  verify->add_option("--min-n", vcfg.min_n, "smallest dimension")->capture_default_str();
  verify->add_option("--max-n", vcfg.max_n, "largest dimension")->capture_default_str();
  verify->add_option("--seed", vcfg.seed, "base seed")->capture_default_str();
  verify->add_option("--family", vfamily, "matrix family")
      ->check(CLI::IsMember({"all", "range-symmetric", "general"}))
      ->capture_default_str();
  verify->add_option("--a12", va12, "fixed A12 scale for general trials (default: cycle 0.1, 1, 10)");
  verify->add_option("--pairs", vcfg.pairs, "(b, x0) pairs per matrix")->capture_default_str();
  verify->add_option("--cond-cap", vcfg.cond_cap, "condition cap of A11")->capture_default_str();
  verify->add_option("--threads", vthreads, "worker threads (default: THREADS or all cores)");
  verify->add_option("--report", report_path, "also write a JSON summary here");
  vsolver.add(*verify);

  std::string out_matrix, out_rhs, format = "array";
  auto* generate = app.add_subcommand("generate", "write a generated system as Matrix Market files");
  ProblemFlags gen;
  generate->add_option("--generate", gen.generate, "family")
      ->required()
      ->check(CLI::IsMember({"range-symmetric", "general", "nilpotent", "nonsingular"}));
  generate->add_option("--n", gen.n, "dimension")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--rank", gen.rank, "rank (default: n/2)");
  generate->add_option("--a12", gen.a12, "||A12||_F / ||A11||_F for the general family")->capture_default_str();
  auto* gc = generate->add_flag("--consistent", gen.consistent, "b in R(A)");
  generate->add_flag("--inconsistent", gen.inconsistent, "b outside R(A) (default)")->excludes(gc);
  generate->add_option("--seed", gen.seed, "seed")->capture_default_str();
  generate->add_option("--cond-cap", gen.cond_cap, "condition cap of A11")->capture_default_str();
  generate->add_option("--matrix", out_matrix, "output path for A")->required();
  generate->add_option("--rhs", out_rhs, "output path for b");
  generate->add_option("--format", format, "Matrix Market format")
      ->check(CLI::IsMember({"array", "coordinate"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_usage;
  }

  try {
    if (solve->parsed() || diagnose->parsed()) {
      const Problem p = problem.load();
      const CommandOutcome out =
          solve->parsed() ? run_solve(p, solver.options()) : run_diagnose(p, solver.options());
      emit(serialize_report(out.report), report_path);
      return out.exit_code;
    }
    if (verify->parsed()) {
      vcfg.family = *verify_family_from_string(vfamily);
      vcfg.a12 = va12;
      vcfg.opts = vsolver.options();
      vcfg.threads = vthreads.value_or(threads_from_env().value_or(0));
      vcfg.validate();
      const VerifySummary s = run_verify(vcfg);
      std::cout << format_summary(s);
      if (!report_path.empty()) emit(dump_json(summary_json(s, vcfg)), report_path);
      return s.all_pass() ? 0 : 3;
    }
    if (generate->parsed()) {
      const Problem p = generate_problem(gen.request());
      const MmFormat fmt = format == "coordinate" ? MmFormat::Coordinate : MmFormat::Array;
      write_matrix_market_file(out_matrix, p.a, fmt);
      if (!out_rhs.empty()) write_vector_file(out_rhs, p.b);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const MatrixMarketError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_usage;
}
