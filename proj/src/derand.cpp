#include "lll/derand.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lll/error.hpp"

namespace lll {

PartialLabeling solve_edgeless(const Csp& csp) {
  if (dependency_graph(csp).edge_count() != 0) {
    throw Error(ErrorKind::precondition_violated, "dependency graph has edges");
  }
  PartialLabeling f(csp.num_variables());
  for (const auto& con : csp.constraints()) {
    AssignmentCode code = 0;
    while (code < con.bad.size() && con.bad[code] == code) ++code;
    if (code == csp.assignment_count(con.id)) {
      throw Error(ErrorKind::unsatisfiable, "constraint " + std::to_string(con.id) + " forbids every assignment");
    }
    auto labels = decode_assignment(code, con.domain.size(), csp.num_labels());
    for (std::size_t j = 0; j < labels.size(); ++j) f.set(con.domain[j], labels[j]);
  }
  for (VariableId v = 0; v < csp.num_variables(); ++v) {
    if (!f.is_defined(v)) f.set(v, 0);
  }
  return f;
}

PartialLabeling induction_step(const QuotientCsp& q, std::span<const ConstraintId> color_class) {
  const Csp& csp = q.base;
  const FiniteGraph dep = dependency_graph(csp);
  const unsigned long factor = static_cast<unsigned long>(dep.max_degree() + 1);
  const std::size_t k = csp.num_labels();
  PartialLabeling added(csp.num_variables());
  for (ConstraintId c : color_class) {
    std::vector<VariableId> free;
    for (VariableId v : csp.constraint(c).domain) {
      if (!q.fixed.is_defined(v)) free.push_back(v);
    }
    const auto neighborhood = closed_neighborhood(dep, c);
    std::vector<Rational> before;
    for (ConstraintId a : neighborhood) before.push_back(conditional_prob_bad(csp, a, q.fixed));
    auto space = assignment_space(k, free.size(), csp.materialization_cap());
    if (!space) throw Error(ErrorKind::cap_exceeded, "free part of constraint " + std::to_string(c) + " exceeds the materialization cap");
    bool found = false;
    for (AssignmentCode code = 0; code < *space && !found; ++code) {
      PartialLabeling trial = q.fixed;
      auto labels = decode_assignment(code, free.size(), k);
      for (std::size_t j = 0; j < free.size(); ++j) trial.set(free[j], labels[j]);
      found = true;
      for (std::size_t i = 0; i < neighborhood.size() && found; ++i) {
        found = conditional_prob_bad(csp, neighborhood[i], trial) <= before[i] * factor;
      }
      if (found) {
        for (std::size_t j = 0; j < free.size(); ++j) added.set(free[j], labels[j]);
      }
    }
    if (!found) {
      throw Error(ErrorKind::internal_invariant, "no assignment of constraint " + std::to_string(c) + " keeps the conditional masses bounded");
    }
  }
  return added;
}

DoubleExpResult solve_double_exp(const Csp& csp) {
  const auto stats = csp_stats(csp);
  DoubleExpResult result;
  result.d = stats.max_dep_degree;
  result.p = stats.p_max;
  if (!lll_condition(result.p, result.d, LllVariant::double_exp).holds) {
    throw Error(ErrorKind::precondition_violated, "p (d+1)^(d+1) < 1 fails with p = " + to_string(result.p) + ", d = " +
                                                      std::to_string(result.d));
  }
  const FiniteGraph dep = dependency_graph(csp);
  const auto colors = greedy_proper_coloring(power_graph(dep, 2));
  std::map<std::size_t, std::vector<ConstraintId>> classes;
  for (ConstraintId c = 0; c < colors.size(); ++c) classes[colors[c]].push_back(c);
  result.classes = classes.size();

  const std::size_t m = csp.num_constraints();
  PartialLabeling f(csp.num_variables());
  for (ConstraintId a = 0; a < m; ++a) result.initial_masses.push_back(prob_bad(csp, a));
  std::vector<std::size_t> touches(m, 0);
  for (const auto& [color, members] : classes) {
    PartialLabeling added = induction_step(quotient_csp(csp, f), members);
    for (VariableId v = 0; v < added.size(); ++v) {
      if (added.is_defined(v)) f.set(v, added.at(v));
    }
    std::vector<bool> touched(m, false);
    for (ConstraintId c : members) {
      for (ConstraintId a : closed_neighborhood(dep, c)) touched[a] = true;
    }
    MassLedgerStep step;
    step.color_class = members;
    for (ConstraintId a = 0; a < m; ++a) {
      if (touched[a]) ++touches[a];
      step.masses.push_back(conditional_prob_bad(csp, a, f));
    }
    step.touch_counts = touches;
    result.ledger.push_back(std::move(step));
  }
  for (VariableId v = 0; v < csp.num_variables(); ++v) {
    if (!f.is_defined(v)) f.set(v, 0);
  }
  if (!is_solution(csp, f)) throw Error(ErrorKind::internal_invariant, "conditional-probability labeling is not a solution");
  result.labeling = std::move(f);
  return result;
}

bool ledger_is_sound(const DoubleExpResult& result, const Csp& csp) {
  const std::size_t m = csp.num_constraints();
  const unsigned long factor = static_cast<unsigned long>(result.d + 1);
  if (result.initial_masses.size() != m) return false;
  std::vector<Rational> previous = result.initial_masses;
  std::vector<std::size_t> previous_touches(m, 0);
  for (const auto& step : result.ledger) {
    if (step.masses.size() != m || step.touch_counts.size() != m) return false;
    for (ConstraintId a = 0; a < m; ++a) {
      const std::size_t touched = step.touch_counts[a] - previous_touches[a];
      if (touched > 1) return false;
      if (touched == 0 && step.masses[a] != previous[a]) return false;
      if (step.masses[a] > previous[a] * factor) return false;
      if (step.touch_counts[a] > result.d + 1) return false;
      if (step.masses[a] > result.initial_masses[a] * pow(Rational(factor), step.touch_counts[a])) return false;
    }
    previous = step.masses;
    previous_touches = step.touch_counts;
  }
  return true;
}

std::optional<std::size_t> least_valid_radius(const GrowthProfile& growth, const Rational& eps) {
  for (std::size_t r = 1; r <= growth.max_radius(); ++r) {
    if (Rational(static_cast<unsigned long>(growth.gamma_at(r))) * pow(1 - eps, r) < 1) return r;
  }
  return std::nullopt;
}

namespace {

/// Simplest rational (smallest denominator) strictly inside (lo, hi), 0 <= lo < hi.
Rational simplest_between(Rational lo, Rational hi) {
  BigInt whole = lo.get_num() / lo.get_den();
  Rational candidate(whole + 1);
  if (candidate < hi) return candidate;
  Rational frac_lo = lo - Rational(whole);
  Rational frac_hi = hi - Rational(whole);
  if (frac_lo == 0) {
    // smallest 1/q below frac_hi
    BigInt q = frac_hi.get_den() / frac_hi.get_num() + 1;
    return Rational(whole) + Rational(1, 1) / Rational(q);
  }
  Rational inner = simplest_between(1 / frac_hi, 1 / frac_lo);
  Rational out = Rational(whole) + 1 / inner;
  out.canonicalize();
  return out;
}

double log2_rational(const Rational& x) {
  long exp_num = 0, exp_den = 0;
  double num = mpz_get_d_2exp(&exp_num, x.get_num_mpz_t());
  double den = mpz_get_d_2exp(&exp_den, x.get_den_mpz_t());
  return std::log2(num) - std::log2(den) + static_cast<double>(exp_num - exp_den);
}

}  // namespace

AdvisorReport parameter_advisor(const Rational& p, std::size_t d, const Rational& s, const GrowthProfile& growth,
                                const std::optional<Rational>& eps_override, std::uint64_t cap) {
  if (growth.max_radius() == 0 || growth.proxy_radius == 0) {
    throw Error(ErrorKind::invalid_parameter, "growth profile is empty");
  }
  AdvisorReport report;
  report.params.p = p;
  report.params.d = d;
  report.params.s = s;
  report.lll_exponent_holds = lll_condition(p, d, LllVariant::exponent, s).holds;
  if (!report.lll_exponent_holds) throw Error(ErrorKind::hypothesis_violated, "p (e(d+1))^s < 1 fails");

  const Rational eps_hi = 1 - 1 / s;
  const Rational proxy_gamma(static_cast<unsigned long>(growth.proxy_gamma));
  auto beats_proxy = [&](const Rational& eps) { return proxy_gamma * pow(1 - eps, growth.proxy_radius) < 1; };
  Rational eps;
  if (eps_override) {
    eps = *eps_override;
    if (eps <= 0 || eps >= 1) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0,1)");
    if (eps >= eps_hi) throw Error(ErrorKind::hypothesis_violated, "eps + 1/s < 1 fails");
  } else {
    if (!beats_proxy(eps_hi)) {
      throw Error(ErrorKind::hypothesis_violated, "growth proxy " + std::to_string(growth.proxy_value()) + " is not below s = " + to_string(s));
    }
    Rational lo = 0, hi = eps_hi;
    for (int i = 0; i < 40; ++i) {
      Rational mid = (lo + hi) / 2;
      if (beats_proxy(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const Rational mid = (lo + eps_hi) / 2;
    const Rational spread = (eps_hi - lo) / 10;
    eps = simplest_between(mid - spread, mid + spread);
    if (!beats_proxy(eps)) eps = hi;
  }
  report.params.eps = eps;
  report.growth_target = 1 / (1 - eps);

  auto R = least_valid_radius(growth, eps);
  if (!R) throw Error(ErrorKind::invalid_parameter, "no profiled radius R satisfies gamma(R) < (1-eps)^-R");
  report.params.R = *R;

  const Rational slack = 1 - eps - 1 / s;
  Rational eta(1, 2);
  while (!rational_power_less_equal(p, slack, (1 - eta) / (1 + eta))) {
    eta /= 2;
    if (eta < Rational(1, 1UL << 62)) throw Error(ErrorKind::hypothesis_violated, "no eta satisfies p^(1-eps-1/s) <= (1-eta)/(1+eta)");
  }
  report.params.eta = eta;

  if (2 * *R > growth.max_radius() && growth.saturation_radius > growth.max_radius()) {
    throw Error(ErrorKind::invalid_parameter, "growth profile does not reach radius 2R = " + std::to_string(2 * *R));
  }
  report.gamma_R = growth.gamma_at(*R);
  report.gamma_2R = growth.gamma_at(2 * *R);
  report.F = lbad_bound(d, eta, *R, report.gamma_R, 0);
  const Rational threshold = report.F.hi * pow(Rational(static_cast<unsigned long>(report.gamma_2R)), report.gamma_2R);
  report.log2_N_threshold = log2_rational(threshold);

  const Rational base = 1 + eta;
  const double step = log2_rational(base);
  std::size_t N = static_cast<std::size_t>(std::max(1.0, std::ceil(report.log2_N_threshold / step)));
  while (pow(base, N) <= threshold) ++N;
  while (N > 1 && pow(base, N - 1) > threshold) --N;
  report.params.N = N;
  report.params.depth = (d + 1) * N + 1;

  report.log2_materialization_lower = static_cast<double>(report.params.depth);
  const double cap_bits = std::log2(static_cast<double>(cap));
  report.desk_feasible = report.log2_materialization_lower <= cap_bits;
  if (report.desk_feasible) {
    report.verdict = "feasible";
  } else {
    report.verdict = "infeasible-at-desk-scale: depth " + std::to_string(report.params.depth) +
                     " forces at least 2^" + std::to_string(report.params.depth) +
                     " assignments per meta-constraint against a cap of 2^" + std::to_string(static_cast<int>(cap_bits));
  }
  return report;
}

namespace {

void validate_pipeline_params(const Csp& csp, const PipelineParams& params) {
  if (params.eps <= 0 || params.eps >= 1) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0,1)");
  if (params.R < 1 || params.N < 1 || params.depth < 1) throw Error(ErrorKind::invalid_parameter, "R, N and depth must be positive");
  const FiniteGraph dep = dependency_graph(csp);
  const auto gamma = growth_profile(dep, params.R).gamma_at(params.R);
  if (Rational(static_cast<unsigned long>(gamma)) * pow(1 - params.eps, params.R) >= 1) {
    throw Error(ErrorKind::invalid_parameter, "gamma(R) < (1-eps)^-R fails for R = " + std::to_string(params.R));
  }
  const auto stats = csp_stats(csp);
  if (params.depth <= stats.vdeg * params.N) {
    throw Error(ErrorKind::invalid_parameter, "depth must exceed vdeg * N = " + std::to_string(stats.vdeg * params.N));
  }
}

bool locally_good_everywhere(const Csp& csp, const Table& table, const PipelineParams& params, std::uint64_t node_cap) {
  for (ConstraintId c = 0; c < csp.num_constraints(); ++c) {
    if (!is_locally_good(csp, table, LocalParams{c, params.R, params.N, params.eps, 0}, node_cap).locally_good) return false;
  }
  return true;
}

}  // namespace

PipelineResult pipeline(const Csp& csp, const PipelineParams& params, const PipelineMode& mode, const PipelineLimits& limits) {
  validate_pipeline_params(csp, params);
  PipelineResult result;
  const MtaOptions options{std::nullopt, false};

  if (std::holds_alternative<pipeline_mode::Deterministic>(mode)) {
    Csp lg;
    try {
      lg = build_lg_csp(csp, params.R, params.N, params.eps, params.depth, limits.materialization_cap, limits.node_cap);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::cap_exceeded) throw;
      throw Error(ErrorKind::infeasible, std::string("materialization cap: ") + e.what());
    }
    const auto lg_stats = csp_stats(lg);
    result.lg_max_degree = lg_stats.max_dep_degree;
    result.lg_p_max = lg_stats.p_max;
    result.provenance.push_back("built meta-CSP with " + std::to_string(lg.num_labels()) + " column labels");
    DoubleExpResult solved = solve_double_exp(lg);
    result.provenance.push_back("solved meta-CSP with " + std::to_string(solved.classes) + " color classes");
    result.table = table_from_columns(solved.labeling, params.depth, csp.num_labels());
    if (!locally_good_everywhere(csp, result.table, params, limits.node_cap)) {
      throw Error(ErrorKind::internal_invariant, "meta-CSP solution is not a locally good table");
    }
    result.provenance.push_back("verified local goodness for every constraint");
    result.attempts = 1;
    result.run = mta_run(csp, result.table, strategy::MaximalGreedy{}, options);
    if (result.run.status != RunStatus::completed || !is_solution(csp, result.run.result)) {
      throw Error(ErrorKind::internal_invariant, "maximal algorithm did not complete on a locally good table");
    }
    result.provenance.push_back("maximal algorithm completed after " + std::to_string(result.run.iterations_run) + " iterations");
    result.solution = result.run.result;
    return result;
  }

  const auto& random = std::get<pipeline_mode::Randomized>(mode);
  for (std::size_t attempt = 0; attempt < random.trials; ++attempt) {
    result.attempts = attempt + 1;
    Table table = sample_table(csp, params.depth, random.seed, attempt);
    bool good = false;
    try {
      good = locally_good_everywhere(csp, table, params, limits.node_cap);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded) throw;
    }
    if (!good) continue;
    RunTrace run = mta_run(csp, table, strategy::MaximalGreedy{}, options);
    if (run.status != RunStatus::completed || !is_solution(csp, run.result)) continue;
    result.provenance.push_back("sampled locally good table on attempt " + std::to_string(attempt + 1));
    result.table = std::move(table);
    result.run = std::move(run);
    result.solution = result.run.result;
    return result;
  }
  throw Error(ErrorKind::unsatisfiable, "no locally good table with a completed run in " + std::to_string(random.trials) + " attempts");
}

}  // namespace lll
