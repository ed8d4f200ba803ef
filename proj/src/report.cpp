#include "sgmres/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgmres/decomposed_gmres.hpp"
#include "sgmres/matgen.hpp"
#include "sgmres/matrix_market.hpp"
#include "sgmres/oracle.hpp"
#include "sgmres/range_decomposition.hpp"

namespace sgmres {

using nlohmann::ordered_json;

namespace {

template <class T>
ordered_json nullable(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

double real_at(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

template <class T>
std::optional<T> optional_at(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

std::string json_real(double x) {
  if (!std::isfinite(x)) return "null";
  std::string s = format_real(x);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar(const ordered_json& j) { return !j.is_object() && !j.is_array(); }

bool is_flat(const ordered_json& j) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      if (!is_scalar(v)) return false;
    return true;
  }
  return j.is_array() && std::all_of(j.begin(), j.end(), is_scalar);
}

void write_json(std::string& out, const ordered_json& j, int indent, bool inline_flat) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      const bool one_line = inline_flat && is_flat(j);
      out += one_line ? "{" : "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += one_line ? ", " : ",\n";
        first = false;
        if (!one_line) out += pad;
        out += ordered_json(k).dump();
        out += ": ";
        write_json(out, v, indent + 2, false);
      }
      out += one_line ? "}" : "\n" + close + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_flat(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(out, j[i], indent, false);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(out, j[i], indent + 2, true);
      }
      out += "\n" + close + "]";
      return;
    }
    case ordered_json::value_t::number_float:
      out += json_real(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const ordered_json& j) {
  std::string out;
  write_json(out, j, 0, false);
  out += '\n';
  return out;
}

ordered_json to_json(const DiagnosticReport& rep) {
  ordered_json j;
  j["tool"] = rep.tool;
  j["version"] = rep.version;
  j["command"] = rep.command;

  const auto& in = rep.input;
  j["input"] = {{"n", in.n},
                {"r", in.r},
                {"a12_rel", in.a12_rel},
                {"consistent", in.consistent},
                {"source", in.source},
                {"seed", nullable(in.seed)}};

  const auto& s = rep.settings;
  j["settings"] = {{"tol_breakdown", s.tol_breakdown},
                   {"tol_rank", s.tol_rank},
                   {"rtol", s.rtol},
                   {"netol", s.netol},
                   {"max_iter", nullable(s.max_iter)},
                   {"reorthogonalize", s.reorthogonalize},
                   {"tol_range_symmetric", s.tol_range_symmetric},
                   {"certificate_tol", s.certificate_tol}};

  ordered_json rows = ordered_json::array();
  for (const auto& it : rep.iterations)
    rows.push_back({{"j", it.j},
                    {"h_next", it.h_next},
                    {"residual_estimate", it.residual_estimate},
                    {"residual", it.residual},
                    {"rank_v1", nullable(it.rank_v1)},
                    {"parallel_sin", nullable(it.parallel_sin)}});
  j["iterations"] = std::move(rows);

  const auto& v = rep.verdicts;
  j["verdicts"] = {{"is_ls", v.is_ls},
                   {"normal_eq_rel", v.normal_eq_rel},
                   {"residual", v.residual},
                   {"oracle_residual", v.oracle_residual},
                   {"gap", v.gap},
                   {"residual_floor", v.residual_floor},
                   {"termination", v.termination},
                   {"steps", v.steps},
                   {"breakdown_index", nullable(v.breakdown_index)},
                   {"bound_r_plus_1", v.bound_r_plus_1},
                   {"equivalence_error", nullable(v.equivalence_error)},
                   {"equivalence_same_steps", nullable(v.equivalence_same_steps)},
                   {"residual_split_error", nullable(v.residual_split_error)},
                   {"rank_profile_pass", nullable(v.rank_profile_pass)},
                   {"max_parallel_sin", nullable(v.max_parallel_sin)},
                   {"a11_nonsingular", nullable(v.a11_nonsingular)},
                   {"range_null_trivial", nullable(v.range_null_trivial)},
                   {"a12_zero", nullable(v.a12_zero)},
                   {"structure_equivalence", nullable(v.structure_equivalence)},
                   {"structure_implication", nullable(v.structure_implication)}};
  return j;
}

DiagnosticReport report_from_json(const ordered_json& j) {
  DiagnosticReport rep;
  rep.tool = j.at("tool").get<std::string>();
  rep.version = j.at("version").get<std::string>();
  rep.command = j.at("command").get<std::string>();

  const auto& in = j.at("input");
  rep.input.n = in.at("n").get<std::size_t>();
  rep.input.r = in.at("r").get<std::size_t>();
  rep.input.a12_rel = real_at(in, "a12_rel");
  rep.input.consistent = in.at("consistent").get<bool>();
  rep.input.source = in.at("source").get<std::string>();
  rep.input.seed = optional_at<std::uint64_t>(in, "seed");

  const auto& s = j.at("settings");
  rep.settings.tol_breakdown = real_at(s, "tol_breakdown");
  rep.settings.tol_rank = real_at(s, "tol_rank");
  rep.settings.rtol = real_at(s, "rtol");
  rep.settings.netol = real_at(s, "netol");
  rep.settings.max_iter = optional_at<std::size_t>(s, "max_iter");
  rep.settings.reorthogonalize = s.at("reorthogonalize").get<bool>();
  rep.settings.tol_range_symmetric = real_at(s, "tol_range_symmetric");
  rep.settings.certificate_tol = real_at(s, "certificate_tol");

  for (const auto& row : j.at("iterations")) {
    ReportIteration it;
    it.j = row.at("j").get<std::size_t>();
    it.h_next = real_at(row, "h_next");
    it.residual_estimate = real_at(row, "residual_estimate");
    it.residual = real_at(row, "residual");
    it.rank_v1 = optional_at<std::size_t>(row, "rank_v1");
    it.parallel_sin = optional_at<double>(row, "parallel_sin");
    rep.iterations.push_back(it);
  }

  const auto& v = j.at("verdicts");
  auto& o = rep.verdicts;
  o.is_ls = v.at("is_ls").get<bool>();
  o.normal_eq_rel = real_at(v, "normal_eq_rel");
  o.residual = real_at(v, "residual");
  o.oracle_residual = real_at(v, "oracle_residual");
  o.gap = real_at(v, "gap");
  o.residual_floor = real_at(v, "residual_floor");
  o.termination = v.at("termination").get<std::string>();
  o.steps = v.at("steps").get<std::size_t>();
  o.breakdown_index = optional_at<std::size_t>(v, "breakdown_index");
  o.bound_r_plus_1 = v.at("bound_r_plus_1").get<bool>();
  o.equivalence_error = optional_at<double>(v, "equivalence_error");
  o.equivalence_same_steps = optional_at<bool>(v, "equivalence_same_steps");
  o.residual_split_error = optional_at<double>(v, "residual_split_error");
  o.rank_profile_pass = optional_at<bool>(v, "rank_profile_pass");
  o.max_parallel_sin = optional_at<double>(v, "max_parallel_sin");
  o.a11_nonsingular = optional_at<bool>(v, "a11_nonsingular");
  o.range_null_trivial = optional_at<bool>(v, "range_null_trivial");
  o.a12_zero = optional_at<bool>(v, "a12_zero");
  o.structure_equivalence = optional_at<bool>(v, "structure_equivalence");
  o.structure_implication = optional_at<bool>(v, "structure_implication");
  return rep;
}

std::string serialize_report(const DiagnosticReport& report) { return dump_json(to_json(report)); }

DiagnosticReport parse_report(std::string_view text) {
  return report_from_json(ordered_json::parse(text.begin(), text.end()));
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::RangeSymmetric: return "range-symmetric";
    case Family::General: return "general";
    case Family::Nilpotent: return "nilpotent";
    case Family::Nonsingular: return "nonsingular";
  }
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view s) {
  for (auto f : {Family::RangeSymmetric, Family::General, Family::Nilpotent, Family::Nonsingular})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

Problem generate_problem(const GenerateRequest& req) {
  Problem p;
  p.source = "generate:" + std::string(to_string(req.family));
  const std::size_t n = req.n;
  switch (req.family) {
    case Family::Nilpotent:
      p.a = shift_nilpotent(n);
      p.b.assign(n, 0.0);
      p.b[0] = 1.0;
      break;
    case Family::Nonsingular: {
      if (n == 0) throw std::invalid_argument("generate: n must be at least 1");
      Rng rng(req.seed);
      p.a = random_conditioned(n, req.cond_cap, rng);
      p.b = random_vector(n, split_seed(req.seed, 1));
      p.seed = req.seed;
      break;
    }
    case Family::RangeSymmetric:
    case Family::General: {
      GenSpec spec;
      spec.n = n;
      spec.r = req.rank.value_or(std::max<std::size_t>(1, n / 2));
      spec.seed = req.seed;
      spec.a12_scale = req.family == Family::General ? req.a12 : 0.0;
      spec.cond_cap = req.cond_cap;
      const GeneratedMatrix g = generate_singular(spec);
      const RangeBasis basis{g.q.column_block(0, spec.r), g.q.column_block(spec.r, n - spec.r), spec.r};
      p.a = g.a;
      p.b = gen_rhs(g.a, basis, req.consistent, split_seed(req.seed, 1));
      p.seed = req.seed;
      break;
    }
  }
  p.x0.assign(n, 0.0);
  return p;
}

namespace {

struct Analysis {
  std::size_t r = 0;
  std::optional<RangeBasis> basis;
  double a12_rel = 0.0;
  bool consistent = false;
  double floor = 0.0;
};

Analysis analyze(const Problem& p, const SolverOptions& opts) {
  Analysis an;
  const SvdFactors f = svd(p.a);
  an.r = numerical_rank(f, opts.tol_rank);
  if (an.r > 0) {
    an.basis = range_basis(f, opts.tol_rank);
    an.a12_rel = range_symmetry(p.a, decompose_matrix(p.a, *an.basis), opts.tol_range_symmetric).a12_rel;
    an.floor = residual_floor(p.b, *an.basis);
  } else {
    an.floor = norm2(p.b);
  }
  an.consistent = an.floor <= opts.tol_rank * norm2(p.b);
  return an;
}

void check_problem(const Problem& p) {
  if (p.a.rows() != p.a.cols()) throw std::invalid_argument("matrix must be square");
  if (p.b.size() != p.a.rows())
    throw std::invalid_argument("right-hand side has length " + std::to_string(p.b.size()) +
                                ", expected " + std::to_string(p.a.rows()));
  if (p.x0.size() != p.a.rows())
    throw std::invalid_argument("initial guess has length " + std::to_string(p.x0.size()) +
                                ", expected " + std::to_string(p.a.rows()));
}

DiagnosticReport base_report(const char* command, const Problem& p, const SolverOptions& opts,
                             double certificate_tol, const Analysis& an, const GmresResult& res) {
  DiagnosticReport rep;
  rep.command = command;
  rep.input = {p.a.rows(), an.r, an.a12_rel, an.consistent, p.source, p.seed};
  rep.settings = {opts.tol_breakdown, opts.tol_rank,          opts.rtol,      opts.netol,
                  opts.max_iter,      opts.reorthogonalize,   opts.tol_range_symmetric,
                  certificate_tol};
  for (const auto& t : res.trace) {
    ReportIteration it;
    it.j = t.j;
    it.h_next = t.h_next;
    it.residual_estimate = t.residual_estimate;
    it.residual = t.residual;
    rep.iterations.push_back(it);
  }
  const LsVerdict ls = certify_least_squares(p.a, p.b, res.x, certificate_tol, opts.tol_rank);
  auto& v = rep.verdicts;
  v.is_ls = ls.is_ls;
  v.normal_eq_rel = ls.normal_eq_rel;
  v.residual = ls.residual;
  v.oracle_residual = ls.oracle_residual;
  v.gap = ls.gap;
  v.residual_floor = an.floor;
  v.termination = std::string(to_string(res.termination));
  v.steps = res.steps();
  v.breakdown_index = res.breakdown_index;
  v.bound_r_plus_1 = res.steps() <= an.r + 1;
  return rep;
}

}  // namespace

CommandOutcome run_solve(const Problem& p, const SolverOptions& opts, double certificate_tol) {
  check_problem(p);
  const Analysis an = analyze(p, opts);
  const GmresResult res = gmres(p.a, p.b, p.x0, opts);
  CommandOutcome out;
  out.report = base_report("solve", p, opts, certificate_tol, an, res);
  out.exit_code = out.report.verdicts.is_ls ? 0 : 3;
  return out;
}

CommandOutcome run_diagnose(const Problem& p, const SolverOptions& opts, double certificate_tol) {
  check_problem(p);
  const Analysis an = analyze(p, opts);
  if (!an.basis) throw std::domain_error("matrix is numerically zero; no range decomposition");
  const GmresResult res = gmres(p.a, p.b, p.x0, opts);
  const DecomposedRun dec = decomposed_gmres(p.a, p.b, p.x0, *an.basis, opts);
  const DecomposedTrace& t = dec.trace;

  CommandOutcome out;
  DiagnosticReport& rep = out.report;
  rep = base_report("diagnose", p, opts, certificate_tol, an, res);

  const ParallelismReport par = lemma_parallelism_check(t);
  for (auto& it : rep.iterations) {
    const std::size_t i = it.j - 1;
    if (i < t.rank_v1.size()) it.rank_v1 = t.rank_v1[i];
    if (i < par.present.size() && par.present[i]) it.parallel_sin = par.sin_angle[i];
  }

  auto& v = rep.verdicts;
  const Equivalence eq = compare_runs(res, dec.result);
  v.equivalence_error = std::max(eq.hessenberg_err, eq.solution_err);
  v.equivalence_same_steps = eq.same_steps && eq.same_termination;

  const double nb = norm2(p.b);
  double split = 0.0;
  auto account = [&](std::span<const double> x) {
    const ResidualSplit s = residual_split_check(t, x);
    split = std::max(split, std::abs(s.lhs - s.rhs) / (nb * nb + 1.0));
  };
  account(p.x0);
  for (const auto& x : res.iterates) account(x);
  v.residual_split_error = split;

  const auto profile = rank_profile(t, opts.tol_rank);
  v.rank_profile_pass = std::all_of(profile.begin(), profile.end(), [](const RankEntry& e) { return e.pass; });
  v.max_parallel_sin = par.max_angle;

  const TheoremVerdicts th = check_structure_theorems(p.a, opts.tol_range_symmetric, opts.tol_rank);
  v.a11_nonsingular = th.a11_nonsingular;
  v.range_null_trivial = th.range_null_trivial;
  v.a12_zero = th.a12_zero;
  v.structure_equivalence = th.equivalence_holds();
  v.structure_implication = th.implication_holds();

  out.exit_code = v.is_ls ? 0 : 3;
  return out;
}

}  // namespace sgmres
