#include "lll/local_goodness.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "lll/error.hpp"

namespace lll {

void LocalParams::validate() const {
  if (eps <= 0 || eps >= 1) throw Error(ErrorKind::invalid_parameter, "eps must lie in (0,1)");
  if (N < 1) throw Error(ErrorKind::invalid_parameter, "N must be at least 1");
  if (eta != 0 && (eta <= 0 || eta >= 1)) throw Error(ErrorKind::invalid_parameter, "eta must lie in (0,1)");
}

namespace {

std::vector<AssignmentCode> all_codes(const Csp& csp, const std::vector<VariableId>& domain) {
  auto space = assignment_space(csp.num_labels(), domain.size(), csp.materialization_cap());
  if (!space) throw Error(ErrorKind::cap_exceeded, "assignment space exceeds the materialization cap");
  std::vector<AssignmentCode> codes(*space);
  for (AssignmentCode i = 0; i < *space; ++i) codes[i] = i;
  return codes;
}

}  // namespace

Csp local_csp(const Csp& csp, ConstraintId c, std::size_t r) {
  const auto inside = ball(dependency_graph(csp), c, r);
  std::vector<Constraint> constraints = csp.constraints();
  for (auto& con : constraints) {
    if (!std::binary_search(inside.begin(), inside.end(), con.id)) con.bad = all_codes(csp, con.domain);
  }
  return Csp(csp.num_variables(), csp.weights(), std::move(constraints), csp.materialization_cap());
}

Csp augmented_local_csp(const Csp& csp, ConstraintId c, std::size_t r, std::size_t R) {
  if (R == 0) throw Error(ErrorKind::invalid_parameter, "R must be at least 1");
  Csp local = local_csp(csp, c, r);
  std::vector<Constraint> constraints = local.constraints();
  Constraint extra;
  extra.id = constraints.size();
  extra.domain = extended_domain(csp, c, R - 1);
  extra.bad = all_codes(csp, extra.domain);
  constraints.push_back(std::move(extra));
  return Csp(csp.num_variables(), csp.weights(), std::move(constraints), csp.materialization_cap());
}

std::vector<VariableId> extended_domain(const Csp& csp, ConstraintId c, std::size_t R) {
  std::vector<VariableId> out;
  for (ConstraintId a : ball(dependency_graph(csp), c, R)) {
    const auto& domain = csp.constraint(a).domain;
    out.insert(out.end(), domain.begin(), domain.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FolnerCounts folner_counts(const MtSequence& seq, const Csp& csp, ConstraintId c, std::size_t r) {
  const auto inside = ball(dependency_graph(csp), c, r);
  FolnerCounts counts;
  for (const auto& step : seq.steps) {
    for (ConstraintId a : step) {
      if (std::binary_search(inside.begin(), inside.end(), a)) {
        ++counts.inside;
      } else {
        ++counts.outside;
      }
    }
  }
  return counts;
}

namespace {

bool folner_totals(std::size_t inside, std::size_t outside, std::size_t N, const Rational& eps) {
  return inside >= N && Rational(static_cast<unsigned long>(outside)) < eps * static_cast<unsigned long>(inside + outside);
}

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::uint64_t h = 14695981039346656037ULL;
    for (auto x : v) h = (h ^ x) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

/// Depth-first search over firing-count vectors of the constraints in
/// B(c, R) for a Folner sequence consistent with the local CSP at radius r.
class FolnerSearch {
 public:
  FolnerSearch(const Csp& csp, const Table& table, const std::vector<ConstraintId>& outer,
               const std::vector<ConstraintId>& inner, std::size_t N, const Rational& eps,
               std::uint64_t& nodes, std::uint64_t node_cap)
      : csp_(csp), table_(table), N_(N), eps_(eps), nodes_(nodes), node_cap_(node_cap) {
    for (ConstraintId a : inner) {
      if (!csp.constraint(a).domain.empty()) members_.push_back({a, true});
    }
    for (ConstraintId a : outer) {
      if (!std::binary_search(inner.begin(), inner.end(), a) && !csp.constraint(a).domain.empty()) {
        members_.push_back({a, false});
      }
    }
    counts_.assign(members_.size(), 0);
    level_.assign(csp.num_variables(), 0);
  }

  std::optional<std::vector<ConstraintId>> run() {
    if (explore()) return path_;
    return std::nullopt;
  }

 private:
  struct Member {
    ConstraintId id;
    bool inside;
  };

  bool can_fire(const Member& m) const {
    const Constraint& con = csp_.constraint(m.id);
    if (!m.inside) return true;
    AssignmentCode code = 0;
    for (VariableId v : con.domain) {
      if (level_[v] >= table_.depth()) return false;
      code = code * csp_.num_labels() + table_.at(v, level_[v]);
    }
    return csp_.is_bad(m.id, code);
  }

  std::size_t inside_ceiling() const {
    std::size_t total = inside_;
    for (const auto& m : members_) {
      if (!m.inside) continue;
      std::size_t highest = 0;
      for (VariableId v : csp_.constraint(m.id).domain) highest = std::max(highest, level_[v]);
      if (highest < table_.depth()) total += table_.depth() - highest;
    }
    return total;
  }

  void apply(std::size_t i, int delta) {
    counts_[i] = static_cast<std::uint32_t>(static_cast<int>(counts_[i]) + delta);
    for (VariableId v : csp_.constraint(members_[i].id).domain) {
      level_[v] = static_cast<std::size_t>(static_cast<long>(level_[v]) + delta);
    }
    if (members_[i].inside) {
      inside_ = static_cast<std::size_t>(static_cast<long>(inside_) + delta);
    } else {
      outside_ = static_cast<std::size_t>(static_cast<long>(outside_) + delta);
    }
  }

  bool explore() {
    if (folner_totals(inside_, outside_, N_, eps_)) return true;
    if (!visited_.insert(counts_).second) return false;
    if (++nodes_ > node_cap_) {
      throw Error(ErrorKind::budget_exceeded, "local goodness search exceeded " + std::to_string(node_cap_) + " states");
    }
    const std::size_t ceiling = inside_ceiling();
    if (ceiling < N_) return false;
    // outside < eps (inside + outside) can no longer hold once outside (1 - eps) >= eps * ceiling.
    if (Rational(static_cast<unsigned long>(outside_)) * (1 - eps_) >= eps_ * static_cast<unsigned long>(ceiling)) {
      return false;
    }
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (!can_fire(members_[i])) continue;
      apply(i, +1);
      path_.push_back(members_[i].id);
      if (explore()) return true;
      path_.pop_back();
      apply(i, -1);
    }
    return false;
  }

  const Csp& csp_;
  const Table& table_;
  std::size_t N_;
  Rational eps_;
  std::uint64_t& nodes_;
  std::uint64_t node_cap_;
  std::vector<Member> members_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::size_t> level_;
  std::size_t inside_ = 0;
  std::size_t outside_ = 0;
  std::vector<ConstraintId> path_;
  std::unordered_set<std::vector<std::uint32_t>, VectorHash> visited_;
};

}  // namespace

bool is_folner(const MtSequence& seq, const Csp& csp, ConstraintId c, std::size_t r, std::size_t N, const Rational& eps) {
  auto counts = folner_counts(seq, csp, c, r);
  return folner_totals(counts.inside, counts.outside, N, eps);
}

LocalGoodnessResult is_locally_good(const Csp& csp, const Table& table, const LocalParams& params, std::uint64_t node_cap) {
  params.validate();
  if (params.c >= csp.num_constraints()) throw Error(ErrorKind::invalid_input, "unknown constraint " + std::to_string(params.c));
  if (table.num_variables() != csp.num_variables()) {
    throw Error(ErrorKind::invalid_input, "table width does not match the number of variables");
  }
  const FiniteGraph dep = dependency_graph(csp);
  const auto outer = ball(dep, params.c, params.R);
  LocalGoodnessResult result;
  for (std::size_t r = 0; r < params.R; ++r) {
    const auto inner = ball(dep, params.c, r);
    for (ConstraintId a : inner) {
      const Constraint& con = csp.constraint(a);
      if (con.domain.empty() && !con.bad.empty()) {
        result.locally_good = false;
        result.radius = r;
        result.witness.steps.assign(params.N, {a});
        return result;
      }
    }
    FolnerSearch search(csp, table, outer, inner, params.N, params.eps, result.nodes, node_cap);
    if (auto path = search.run()) {
      result.locally_good = false;
      result.radius = r;
      for (ConstraintId a : *path) result.witness.steps.push_back({a});
      return result;
    }
  }
  return result;
}

std::vector<LabelId> decode_column(LabelId column, std::size_t depth, std::size_t num_labels) {
  return decode_assignment(column, depth, num_labels);
}

LabelId encode_column(std::span<const LabelId> rows, std::size_t num_labels) {
  return encode_assignment(rows, num_labels);
}

namespace {

Table table_with_columns(const Csp& csp, std::size_t depth, const std::vector<VariableId>& vars,
                         std::span<const LabelId> columns) {
  if (vars.size() != columns.size()) throw Error(ErrorKind::invalid_input, "one column per extended-domain variable is required");
  Table table(csp.num_variables(), depth, std::vector<LabelId>(csp.num_variables() * depth, 0));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto rows = decode_column(columns[i], depth, csp.num_labels());
    for (std::size_t row = 0; row < depth; ++row) table.set(vars[i], row, rows[row]);
  }
  return table;
}

}  // namespace

bool lbad_contains(const Csp& csp, std::size_t R, std::size_t N, const Rational& eps, std::size_t depth, ConstraintId c,
                   std::span<const LabelId> columns, std::uint64_t node_cap) {
  const auto vars = extended_domain(csp, c, R);
  Table table = table_with_columns(csp, depth, vars, columns);
  return !is_locally_good(csp, table, LocalParams{c, R, N, eps, 0}, node_cap).locally_good;
}

Csp build_lg_csp(const Csp& csp, std::size_t R, std::size_t N, const Rational& eps, std::size_t depth, std::uint64_t cap,
                 std::uint64_t node_cap) {
  const std::size_t k = csp.num_labels();
  auto column_count = assignment_space(k, depth, cap);
  if (!column_count) {
    throw Error(ErrorKind::cap_exceeded, "column label count |labels|^depth exceeds the materialization cap " + std::to_string(cap));
  }
  std::vector<Rational> weights(*column_count);
  for (LabelId col = 0; col < *column_count; ++col) {
    Rational w = 1;
    for (LabelId l : decode_column(col, depth, k)) w *= csp.weight(l);
    weights[col] = w;
  }
  std::vector<Constraint> constraints;
  for (ConstraintId c = 0; c < csp.num_constraints(); ++c) {
    Constraint meta;
    meta.id = c;
    meta.domain = extended_domain(csp, c, R);
    auto space = assignment_space(*column_count, meta.domain.size(), cap);
    if (!space) {
      throw Error(ErrorKind::cap_exceeded, "meta-constraint " + std::to_string(c) + " needs (|labels|^depth)^|dom_R| assignments, over the materialization cap " +
                                               std::to_string(cap));
    }
    for (AssignmentCode code = 0; code < *space; ++code) {
      auto columns = decode_assignment(code, meta.domain.size(), *column_count);
      if (lbad_contains(csp, R, N, eps, depth, c, columns, node_cap)) meta.bad.push_back(code);
    }
    constraints.push_back(std::move(meta));
  }
  return Csp(csp.num_variables(), std::move(weights), std::move(constraints), cap);
}

Table table_from_columns(const PartialLabeling& columns, std::size_t depth, std::size_t num_labels) {
  Table table(columns.size(), depth, std::vector<LabelId>(columns.size() * depth, 0));
  for (VariableId v = 0; v < columns.size(); ++v) {
    auto rows = decode_column(columns.at(v), depth, num_labels);
    for (std::size_t row = 0; row < depth; ++row) table.set(v, row, rows[row]);
  }
  return table;
}

LgDegreeReport lg_degree_check(const Csp& csp, std::size_t R) {
  const std::size_t m = csp.num_constraints();
  std::vector<std::vector<VariableId>> domains(m);
  for (ConstraintId c = 0; c < m; ++c) domains[c] = extended_domain(csp, c, R);
  LgDegreeReport report;
  for (ConstraintId a = 0; a < m; ++a) {
    std::size_t degree = 0;
    for (ConstraintId b = 0; b < m; ++b) {
      if (a == b) continue;
      std::vector<VariableId> common;
      std::set_intersection(domains[a].begin(), domains[a].end(), domains[b].begin(), domains[b].end(), std::back_inserter(common));
      if (!common.empty()) ++degree;
    }
    report.max_degree = std::max(report.max_degree, degree);
  }
  if (m > 0) {
    const auto profile = growth_profile(dependency_graph(csp), 2 * R + 1);
    report.bound = profile.gamma_at(2 * R) - 1;
    report.reach_bound = profile.gamma_at(2 * R + 1) - 1;
  }
  report.pass = report.max_degree <= report.bound;
  report.within_reach = report.max_degree <= report.reach_bound;
  return report;
}

Interval zeta_value(std::size_t d) {
  if (d > 0) return Interval::exact(Rational(1, static_cast<unsigned long>(d + 1)));
  return reciprocal(e_interval(64));
}

bool zeta_condition(std::size_t d) {
  // zeta (1 - zeta)^d >= 1/(e(d+1)); with zeta = 1/e at d = 0 this is an equality.
  if (d == 0) return true;
  const Rational zeta(1, static_cast<unsigned long>(d + 1));
  const Rational lhs = zeta * pow(Rational(1) - zeta, d) * static_cast<unsigned long>(d + 1);
  return !certified_less([&](const Interval& e) { return Interval::exact(lhs) * e; }, 1);
}

Interval lbad_bound(std::size_t d, const Rational& eta, std::size_t R, std::size_t gammaR, std::size_t N) {
  if (eta <= 0 || eta >= 1) throw Error(ErrorKind::invalid_parameter, "eta must lie in (0,1)");
  if (R == 0) throw Error(ErrorKind::invalid_parameter, "R must be at least 1");
  const Interval one_minus_zeta = Interval::exact(1) - zeta_value(d);
  const Interval xi = Interval::exact(eta) * pow(one_minus_zeta, gammaR);
  const Interval denominator = xi * Interval::exact((1 - eta) * pow(1 + eta, N));
  return Interval::exact(Rational(static_cast<unsigned long>(R)) * eta) * reciprocal(denominator);
}

bool rational_power_less_equal(const Rational& x, const Rational& exponent, const Rational& y) {
  if (x < 0 || y < 0 || exponent <= 0) throw Error(ErrorKind::invalid_parameter, "rational power needs x, y >= 0 and a positive exponent");
  if (!exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p()) {
    throw Error(ErrorKind::invalid_parameter, "exponent " + to_string(exponent) + " is too large to decide exactly");
  }
  return pow(x, exponent.get_num().get_ui()) <= pow(y, exponent.get_den().get_ui());
}

HypothesisReport check_lbad_hypotheses(const Rational& p, std::size_t d, const Rational& s, const Rational& eps,
                                       const Rational& eta) {
  HypothesisReport report;
  report.lll_exponent = s > 1 && p >= 0 && p < 1 && lll_condition(p, d, LllVariant::exponent, s).holds;
  const Rational slack = 1 - eps - (s > 0 ? 1 / s : Rational(1));
  report.eps_plus_inverse_s = s > 0 && slack > 0;
  report.eta_bound = report.eps_plus_inverse_s && eta > 0 && eta < 1 && p >= 0 &&
                     rational_power_less_equal(p, slack, (1 - eta) / (1 + eta));
  return report;
}

LbadEstimate estimate_lbad_prob(const Csp& csp, const LocalParams& params, std::size_t depth, std::size_t trials,
                                std::uint64_t seed, const Rational& p, std::size_t d, const Rational& s, std::size_t jobs,
                                std::uint64_t node_cap) {
  params.validate();
  if (trials == 0) throw Error(ErrorKind::invalid_parameter, "at least one trial is required");
  LbadEstimate estimate;
  estimate.hypotheses = check_lbad_hypotheses(p, d, s, params.eps, params.eta);
  if (!estimate.hypotheses.holds()) {
    std::string failing = !estimate.hypotheses.lll_exponent       ? "p (e(d+1))^s < 1"
                          : !estimate.hypotheses.eps_plus_inverse_s ? "eps + 1/s < 1"
                                                                    : "p^(1-eps-1/s) <= (1-eta)/(1+eta)";
    throw Error(ErrorKind::hypothesis_violated, "hypothesis fails: " + failing);
  }
  const auto stats = csp_stats(csp);
  if (stats.p_max > p || stats.max_dep_degree > d) {
    throw Error(ErrorKind::hypothesis_violated, "instance has p = " + to_string(stats.p_max) + ", d = " +
                                                    std::to_string(stats.max_dep_degree) + ", exceeding the supplied p, d");
  }
  const FiniteGraph dep = dependency_graph(csp);
  const std::size_t gammaR = growth_profile(dep, params.R).gamma_at(params.R);
  estimate.bound = lbad_bound(d, params.eta, params.R, gammaR, params.N);

  enum class Verdict { good, bad, unknown };
  std::vector<Verdict> verdicts(trials);
  parallel_for(trials, jobs, [&](std::size_t t) {
    try {
      bool good = is_locally_good(csp, sample_table(csp, depth, seed, t), params, node_cap).locally_good;
      verdicts[t] = good ? Verdict::good : Verdict::bad;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded) throw;
      verdicts[t] = Verdict::unknown;
    }
  });
  estimate.trials = trials;
  for (auto v : verdicts) {
    if (v == Verdict::bad) ++estimate.bad;
    if (v == Verdict::unknown) ++estimate.unknown;
  }
  estimate.frequency = static_cast<double>(estimate.bad + estimate.unknown) / static_cast<double>(trials);
  const double q = std::min(1.0, to_double(estimate.bound.hi));
  estimate.sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
  estimate.pass = estimate.frequency <= to_double(estimate.bound.hi) + 4.0 * estimate.sigma;
  return estimate;
}

}  // namespace lll
