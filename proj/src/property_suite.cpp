#include "sgmres/property_suite.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <charconv>
#include <stdexcept>
#include <thread>

#include "sgmres/decomposed_gmres.hpp"
#include "sgmres/matgen.hpp"
#include "sgmres/oracle.hpp"
#include "sgmres/range_decomposition.hpp"

namespace sgmres {

std::string_view to_string(VerifyFamily f) {
  switch (f) {
    case VerifyFamily::All: return "all";
    case VerifyFamily::RangeSymmetric: return "range-symmetric";
    case VerifyFamily::General: return "general";
  }
  return "unknown";
}

std::optional<VerifyFamily> verify_family_from_string(std::string_view s) {
  for (auto f : {VerifyFamily::All, VerifyFamily::RangeSymmetric, VerifyFamily::General})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

void VerifyConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("verify: trials must be at least 1");
  if (min_n < 2) throw std::invalid_argument("verify: minimum n must be at least 2");
  if (max_n < min_n) throw std::invalid_argument("verify: max n is below min n");
  if (pairs == 0) throw std::invalid_argument("verify: pairs must be at least 1");
  if (a12 && !(*a12 >= 0.0 && std::isfinite(*a12)))
    throw std::invalid_argument("verify: a12 must be finite and nonnegative");
  if (!(cond_cap >= 1.0)) throw std::invalid_argument("verify: cond_cap must be >= 1");
}

bool VerifySummary::all_pass() const noexcept {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyTally& p) { return p.pass(); });
}

std::optional<std::size_t> threads_from_env() {
  const char* s = std::getenv("THREADS");
  if (!s || !*s) return std::nullopt;
  std::size_t v = 0;
  const char* end = s + std::char_traits<char>::length(s);
  auto [ptr, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || ptr != end || v == 0) return std::nullopt;
  return v;
}

namespace {

enum Prop : std::size_t {
  LsRangeSymmetric,
  LsGeneral,
  BreakdownBound,
  ConsistentBound,
  LemmaParallel,
  LemmaConsistent,
  RankProfile,
  Equivalent,
  ResidualSplitProp,
  ResidualFloor,
  BlockRelation,
  ArnoldiRelation,
  Orthonormality,
  MonotoneResidual,
  StructureTheorems,
  NecessityWitness,
  NonsingularSanity,
  PropCount
};

constexpr std::array<const char*, PropCount> prop_names = {
    "ls_certified_range_symmetric",
    "ls_certified_general",
    "breakdown_bound_r_plus_1",
    "consistent_bound_r",
    "lemma_parallel_v2",
    "lemma_consistent_v2_zero",
    "rank_profile",
    "plain_decomposed_equivalence",
    "residual_split",
    "residual_floor",
    "block_relation",
    "arnoldi_relation",
    "basis_orthonormality",
    "monotone_residual_estimate",
    "structure_theorems",
    "necessity_witness",
    "nonsingular_sanity",
};

struct Tallies {
  std::array<PropertyTally, PropCount> t;

  void flag(Prop p, bool ok) {
    ++t[p].checks;
    if (!ok) ++t[p].violations;
  }
  void measure(Prop p, double value, double tol) {
    const double ratio = tol > 0.0 ? value / tol : (value > 0.0 ? INFINITY : 0.0);
    auto& w = t[p].worst_ratio;
    w = std::max(w.value_or(0.0), std::isnan(ratio) ? INFINITY : ratio);
    flag(p, value <= tol);
  }
  void merge(const Tallies& o) {
    for (std::size_t i = 0; i < PropCount; ++i) {
      t[i].checks += o.t[i].checks;
      t[i].violations += o.t[i].violations;
      if (o.t[i].worst_ratio) t[i].worst_ratio = std::max(t[i].worst_ratio.value_or(0.0), *o.t[i].worst_ratio);
    }
  }
};

struct TrialPlan {
  enum Kind { Singular, Witness, Nonsingular } kind = Singular;
  std::size_t index = 0;
  bool range_symmetric = false;
  double a12 = 0.0;
  std::size_t n = 0;  // witnesses only
};

constexpr std::array<double, 3> a12_cycle = {0.1, 1.0, 10.0};

// One (b, x0) pair on a singular matrix.
void check_run(const Matrix& a, const Vector& b, const Vector& x0, const RangeBasis& basis,
               bool range_symmetric, const SolverOptions& opts, Tallies& out) {
  const double na = frobenius_norm(a);
  const double nb = norm2(b);
  const std::size_t r = basis.r;

  const GmresResult plain = gmres(a, b, x0, opts);
  const DecomposedRun dec = decomposed_gmres(a, b, x0, basis, opts);
  const DecomposedTrace& t = dec.trace;
  const std::size_t k = plain.steps();

  const LsVerdict ls = certify_least_squares(a, b, plain.x, 1e-8, opts.tol_rank);
  out.flag(range_symmetric ? LsRangeSymmetric : LsGeneral, ls.is_ls);
  out.flag(BreakdownBound, k <= r + 1);
  if (range_symmetric && t.consistent)
    out.flag(ConsistentBound, k <= r && ls.residual <= 1e-8 * nb);

  const ParallelismReport par = lemma_parallelism_check(t);
  out.measure(LemmaParallel, par.max_angle, 1e-8);
  if (t.consistent) {
    double worst = 0.0;
    for (const auto& v : t.v2) worst = std::max(worst, norm2(v));
    out.measure(LemmaConsistent, worst, 1e-10);
  }

  const auto profile = rank_profile(t, opts.tol_rank);
  out.flag(RankProfile, std::all_of(profile.begin(), profile.end(), [](const RankEntry& e) { return e.pass; }));

  const Equivalence eq = compare_runs(plain, dec.result);
  out.measure(Equivalent, std::max(eq.hessenberg_err, eq.solution_err), 1e-8);
  out.flag(Equivalent, eq.same_steps && eq.same_termination);

  double split = 0.0;
  for (const auto& x : plain.iterates) {
    const ResidualSplit s = residual_split_check(t, x);
    split = std::max(split, std::abs(s.lhs - s.rhs) / (nb * nb + 1.0));
  }
  out.measure(ResidualSplitProp, split, 1e-10);

  const double floor = residual_floor(b, basis);
  out.flag(ResidualFloor, ls.residual >= floor - 1e-10);
  if (range_symmetric) out.measure(ResidualFloor, std::abs(ls.residual - floor), 1e-8 * std::max(nb, 1e-300));

  if (k > 0) {
    const BlockRelationError be = block_relation_error(t, t.steps());
    out.measure(BlockRelation, std::max(be.top, be.bottom), 1e-9 * na);
    out.measure(ArnoldiRelation, arnoldi_relation_error(a, plain, k), 1e-10 * na);
    out.measure(Orthonormality, basis_orthonormality_error(plain), 1e-10 * static_cast<double>(k));
  }

  bool monotone = true;
  double prev = plain.hessenberg.beta;
  for (const auto& rec : plain.trace) {
    monotone = monotone && rec.residual_estimate <= prev + 1e-10 * plain.hessenberg.beta;
    prev = rec.residual_estimate;
  }
  out.flag(MonotoneResidual, monotone);
}

void run_singular_trial(const VerifyConfig& cfg, const TrialPlan& plan, Tallies& out) {
  const std::uint64_t seed = split_seed(cfg.seed, plan.index);
  Rng dims(split_seed(seed, 0));
  const std::size_t span = cfg.max_n - cfg.min_n + 1;
  const std::size_t n = cfg.min_n + std::min(span - 1, static_cast<std::size_t>(dims.uniform() * span));
  const std::size_t r = 1 + std::min(n - 2, static_cast<std::size_t>(dims.uniform() * (n - 1)));

  GenSpec spec{n, r, split_seed(seed, 1), plan.range_symmetric ? 0.0 : plan.a12, cfg.cond_cap};
  const Matrix a = generate_singular(spec).a;
  const RangeBasis basis = range_basis(a, cfg.opts.tol_rank);

  const TheoremVerdicts th = check_structure_theorems(a, cfg.opts.tol_range_symmetric, cfg.opts.tol_rank);
  out.flag(StructureTheorems, th.equivalence_holds() && th.implication_holds());

  for (std::size_t p = 0; p < cfg.pairs; ++p) {
    const bool consistent = p % 2 == 1;
    const Vector b = gen_rhs(a, basis, consistent, split_seed(seed, 10 + p));
    const Vector x0 = p == 0 ? Vector(n, 0.0) : random_vector(n, split_seed(seed, 100 + p));
    check_run(a, b, x0, basis, plan.range_symmetric, cfg.opts, out);
  }
}

void run_witness(const VerifyConfig& cfg, std::size_t n, Tallies& out) {
  const Matrix a = shift_nilpotent(n);
  Vector b(n, 0.0);
  b[0] = 1.0;
  const GmresResult res = gmres(a, b, Vector(n, 0.0), cfg.opts);
  const LsVerdict ls = certify_least_squares(a, b, res.x, 1e-8, cfg.opts.tol_rank);
  out.flag(NecessityWitness, res.steps() == 1 && std::abs(ls.residual - 1.0) <= 1e-12 &&
                                 ls.oracle_residual <= 1e-12 && !ls.is_ls);
  const TheoremVerdicts th = check_structure_theorems(a, cfg.opts.tol_range_symmetric, cfg.opts.tol_rank);
  out.flag(StructureTheorems, th.equivalence_holds() && th.implication_holds() && !th.a11_nonsingular &&
                                  !th.range_null_trivial && !th.a12_zero);
}

void run_nonsingular(const VerifyConfig& cfg, const TrialPlan& plan, Tallies& out) {
  const std::uint64_t seed = split_seed(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL, plan.index);
  Rng rng(seed);
  const std::size_t hi = std::max(cfg.min_n, std::min<std::size_t>(cfg.max_n, 30));
  const std::size_t span = hi - cfg.min_n + 1;
  const std::size_t n = cfg.min_n + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * span));
  const Matrix a = random_conditioned(n, cfg.cond_cap, rng);
  const Vector b = random_vector(n, split_seed(seed, 1));
  const GmresResult res = gmres(a, b, Vector(n, 0.0), cfg.opts);
  out.flag(NonsingularSanity, res.steps() <= n && norm2(subtract(b, matvec(a, res.x))) <= 1e-8 * norm2(b));
}

std::vector<TrialPlan> make_plans(const VerifyConfig& cfg) {
  std::vector<TrialPlan> plans;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    TrialPlan p;
    p.index = t;
    switch (cfg.family) {
      case VerifyFamily::RangeSymmetric: p.range_symmetric = true; break;
      case VerifyFamily::General: p.range_symmetric = false; break;
      case VerifyFamily::All: p.range_symmetric = t % 2 == 0; break;
    }
    const std::size_t cycle = cfg.family == VerifyFamily::All ? t / 2 : t;
    p.a12 = cfg.a12.value_or(a12_cycle[cycle % a12_cycle.size()]);
    plans.push_back(p);
  }
  if (cfg.family == VerifyFamily::All) {
    for (std::size_t n = 2; n <= 6; ++n) {
      TrialPlan p;
      p.kind = TrialPlan::Witness;
      p.n = n;
      plans.push_back(p);
    }
    const std::size_t extra = (cfg.trials + 3) / 4;
    for (std::size_t t = 0; t < extra; ++t) {
      TrialPlan p;
      p.kind = TrialPlan::Nonsingular;
      p.index = t;
      plans.push_back(p);
    }
  }
  return plans;
}

}  // namespace

VerifySummary run_verify(const VerifyConfig& cfg) {
  cfg.validate();
  const std::vector<TrialPlan> plans = make_plans(cfg);
  std::vector<Tallies> results(plans.size());

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < plans.size();) {
      const TrialPlan& p = plans[i];
      switch (p.kind) {
        case TrialPlan::Singular: run_singular_trial(cfg, p, results[i]); break;
        case TrialPlan::Witness: run_witness(cfg, p.n, results[i]); break;
        case TrialPlan::Nonsingular: run_nonsingular(cfg, p, results[i]); break;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Tallies total;
  for (const auto& r : results) total.merge(r);

  VerifySummary s;
  s.trials = cfg.trials;
  for (std::size_t i = 0; i < PropCount; ++i) {
    PropertyTally p = total.t[i];
    p.name = prop_names[i];
    p.required = i != LsGeneral;
    if (p.checks == 0) continue;
    s.properties.push_back(p);
  }
  for (const auto& p : plans) s.runs += p.kind == TrialPlan::Singular ? cfg.pairs : 1;
  return s;
}

std::string format_summary(const VerifySummary& s) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-32s %8s %10s %12s  %s\n", "property", "checks", "violations",
                "worst/tol", "status");
  out += line;
  for (const auto& p : s.properties) {
    char worst[32] = "-";
    if (p.worst_ratio) std::snprintf(worst, sizeof worst, "%.3g", *p.worst_ratio);
    const char* status = p.required ? (p.violations == 0 ? "PASS" : "FAIL") : "INFO";
    std::snprintf(line, sizeof line, "%-32s %8zu %10zu %12s  %s\n", p.name.c_str(), p.checks,
                  p.violations, worst, status);
    out += line;
  }
  std::snprintf(line, sizeof line, "trials %zu, runs %zu: %s\n", s.trials, s.runs,
                s.all_pass() ? "all required properties pass" : "FAILED");
  out += line;
  return out;
}

}  // namespace sgmres
