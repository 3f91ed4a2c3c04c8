#include "lll/csp.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lll/error.hpp"
#include "lll/interval.hpp"

namespace lll {

std::optional<std::uint64_t> assignment_space(std::size_t num_labels, std::size_t arity,
                                              std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (num_labels != 0 && total > cap / num_labels) return std::nullopt;
    total *= num_labels;
  }
  if (total > cap) return std::nullopt;
  return total;
}

AssignmentCode encode_assignment(std::span<const LabelId> labels, std::size_t num_labels) {
  AssignmentCode code = 0;
  for (LabelId l : labels) code = code * num_labels + l;
  return code;
}

std::vector<LabelId> decode_assignment(AssignmentCode code, std::size_t arity, std::size_t num_labels) {
  std::vector<LabelId> labels(arity);
  for (std::size_t i = arity; i-- > 0;) {
    labels[i] = static_cast<LabelId>(code % num_labels);
    code /= num_labels;
  }
  return labels;
}

Csp::Csp(std::size_t num_variables, std::vector<Rational> weights, std::vector<Constraint> constraints,
         std::uint64_t cap)
    : num_variables_(num_variables),
      weights_(std::move(weights)),
      constraints_(std::move(constraints)),
      constraints_of_(num_variables),
      cap_(cap) {
  if (weights_.empty()) throw Error(ErrorKind::invalid_input, "a CSP needs at least one label");
  Rational total = 0;
  for (const auto& w : weights_) {
    if (w <= 0 || w > 1) throw Error(ErrorKind::invalid_input, "label weight " + to_string(w) + " outside (0,1]");
    total += w;
  }
  if (total != 1) throw Error(ErrorKind::invalid_input, "label weights sum to " + to_string(total) + ", not 1");

  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    const std::string name = "constraint " + std::to_string(c.id);
    if (c.id != i) throw Error(ErrorKind::invalid_input, name + " found at position " + std::to_string(i) + "; ids must be dense and ordered");
    for (std::size_t j = 0; j < c.domain.size(); ++j) {
      if (c.domain[j] >= num_variables_) throw Error(ErrorKind::invalid_input, name + " mentions unknown variable " + std::to_string(c.domain[j]));
      if (j > 0 && c.domain[j - 1] >= c.domain[j]) throw Error(ErrorKind::invalid_input, name + " domain not strictly increasing");
    }
    auto space = assignment_space(weights_.size(), c.domain.size(), cap_);
    if (!space) throw Error(ErrorKind::cap_exceeded, name + " assignment space exceeds the materialization cap " + std::to_string(cap_));
    for (std::size_t j = 0; j < c.bad.size(); ++j) {
      if (c.bad[j] >= *space) throw Error(ErrorKind::invalid_input, name + " has an out-of-range bad assignment");
      if (j > 0 && c.bad[j - 1] >= c.bad[j]) throw Error(ErrorKind::invalid_input, name + " bad set not sorted and unique");
    }
    for (VariableId v : c.domain) constraints_of_[v].push_back(c.id);
  }
}

Csp Csp::uniform(std::size_t num_variables, std::size_t num_labels, std::vector<Constraint> constraints,
                 std::uint64_t cap) {
  if (num_labels == 0) throw Error(ErrorKind::invalid_input, "a CSP needs at least one label");
  std::vector<Rational> weights(num_labels, Rational(1, static_cast<unsigned long>(num_labels)));
  return Csp(num_variables, std::move(weights), std::move(constraints), cap);
}

const Constraint& Csp::constraint(ConstraintId c) const {
  if (c >= constraints_.size()) throw Error(ErrorKind::invalid_input, "unknown constraint " + std::to_string(c));
  return constraints_[c];
}

std::uint64_t Csp::assignment_count(ConstraintId c) const {
  return *assignment_space(num_labels(), constraint(c).domain.size(), cap_);
}

bool Csp::is_bad(ConstraintId c, AssignmentCode code) const {
  const auto& bad = constraint(c).bad;
  return std::binary_search(bad.begin(), bad.end(), code);
}

bool operator==(const Constraint& a, const Constraint& b) {
  return a.id == b.id && a.domain == b.domain && a.bad == b.bad;
}

bool operator==(const Csp& a, const Csp& b) {
  return a.num_variables_ == b.num_variables_ && a.weights_ == b.weights_ && a.constraints_ == b.constraints_;
}

Constraint make_constraint(ConstraintId id, std::vector<VariableId> domain,
                           const std::vector<std::vector<LabelId>>& bad_tuples, std::size_t num_labels) {
  const std::string name = "constraint " + std::to_string(id);
  std::vector<std::size_t> order(domain.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return domain[a] < domain[b]; });
  Constraint c;
  c.id = id;
  for (std::size_t i : order) c.domain.push_back(domain[i]);
  if (std::adjacent_find(c.domain.begin(), c.domain.end()) != c.domain.end()) {
    throw Error(ErrorKind::invalid_input, name + " repeats a variable in its domain");
  }
  std::vector<LabelId> permuted(domain.size());
  for (const auto& tuple : bad_tuples) {
    if (tuple.size() != domain.size()) throw Error(ErrorKind::invalid_input, name + " has a bad tuple of the wrong length");
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (tuple[order[j]] >= num_labels) throw Error(ErrorKind::invalid_input, name + " uses an unknown label");
      permuted[j] = tuple[order[j]];
    }
    c.bad.push_back(encode_assignment(permuted, num_labels));
  }
  std::sort(c.bad.begin(), c.bad.end());
  c.bad.erase(std::unique(c.bad.begin(), c.bad.end()), c.bad.end());
  return c;
}

PartialLabeling PartialLabeling::total(std::vector<LabelId> labels) {
  PartialLabeling f(labels.size());
  for (VariableId v = 0; v < labels.size(); ++v) f.set(v, labels[v]);
  return f;
}

LabelId PartialLabeling::at(VariableId v) const {
  const auto& value = values_.at(v);
  if (!value) throw Error(ErrorKind::missing_variable, "labeling undefined at variable " + std::to_string(v));
  return *value;
}

bool PartialLabeling::is_total() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& x) { return x.has_value(); });
}

std::size_t PartialLabeling::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& x) { return x.has_value(); }));
}

std::vector<LabelId> PartialLabeling::labels() const {
  std::vector<LabelId> out(values_.size());
  for (VariableId v = 0; v < values_.size(); ++v) out[v] = at(v);
  return out;
}

bool violates(const Csp& csp, ConstraintId c, const PartialLabeling& f) {
  const Constraint& con = csp.constraint(c);
  AssignmentCode code = 0;
  for (VariableId v : con.domain) {
    if (v >= f.size() || !f.is_defined(v)) {
      throw Error(ErrorKind::missing_variable,
                  "labeling undefined at variable " + std::to_string(v) + " of constraint " + std::to_string(c));
    }
    code = code * csp.num_labels() + f.at(v);
  }
  return csp.is_bad(c, code);
}

bool is_solution(const Csp& csp, const PartialLabeling& f) {
  if (f.size() != csp.num_variables() || !f.is_total()) return false;
  for (const auto& con : csp.constraints()) {
    if (violates(csp, con.id, f)) return false;
  }
  return true;
}

Rational prob_bad(const Csp& csp, ConstraintId c) {
  const Constraint& con = csp.constraint(c);
  Rational total = 0;
  for (AssignmentCode code : con.bad) {
    Rational mass = 1;
    for (LabelId l : decode_assignment(code, con.domain.size(), csp.num_labels())) mass *= csp.weight(l);
    total += mass;
  }
  return total;
}

Rational conditional_prob_bad(const Csp& csp, ConstraintId c, const PartialLabeling& f) {
  const Constraint& con = csp.constraint(c);
  Rational total = 0;
  for (AssignmentCode code : con.bad) {
    auto labels = decode_assignment(code, con.domain.size(), csp.num_labels());
    Rational mass = 1;
    bool agrees = true;
    for (std::size_t j = 0; j < labels.size() && agrees; ++j) {
      const auto& fixed = f.get(con.domain[j]);
      if (fixed) {
        agrees = *fixed == labels[j];
      } else {
        mass *= csp.weight(labels[j]);
      }
    }
    if (agrees) total += mass;
  }
  return total;
}

FiniteGraph dependency_graph(const Csp& csp) {
  std::vector<Edge> edges;
  for (VariableId v = 0; v < csp.num_variables(); ++v) {
    auto owners = csp.constraints_of(v);
    for (std::size_t i = 0; i < owners.size(); ++i) {
      for (std::size_t j = i + 1; j < owners.size(); ++j) edges.emplace_back(owners[i], owners[j]);
    }
  }
  return FiniteGraph(csp.num_constraints(), edges);
}

std::vector<ConstraintId> closed_neighborhood(const FiniteGraph& dependency, ConstraintId c) {
  auto nbrs = dependency.neighbors(c);
  std::vector<ConstraintId> out(nbrs.begin(), nbrs.end());
  out.insert(std::lower_bound(out.begin(), out.end(), c), c);
  return out;
}

CspStats csp_stats(const Csp& csp) {
  CspStats stats;
  for (const auto& con : csp.constraints()) {
    stats.order = std::max(stats.order, con.domain.size());
    stats.p_max = std::max(stats.p_max, prob_bad(csp, con.id));
  }
  for (VariableId v = 0; v < csp.num_variables(); ++v) stats.vdeg = std::max(stats.vdeg, csp.constraints_of(v).size());
  stats.max_dep_degree = dependency_graph(csp).max_degree();
  return stats;
}

LllReport lll_condition(const Rational& p, std::size_t d, LllVariant variant, const Rational& s) {
  if (p < 0 || p >= 1) throw Error(ErrorKind::invalid_parameter, "p must lie in [0,1)");
  LllReport report;
  report.variant = variant;
  const Rational d1(static_cast<unsigned long>(d + 1));
  switch (variant) {
    case LllVariant::classic: {
      auto expr = [&](const Interval& e) { return Interval::exact(p * d1) * e; };
      report.holds = certified_less(expr, 1);
      Interval value = expr(e_interval(64));
      report.lhs_lower = value.lo;
      report.lhs_upper = value.hi;
      report.inequality = "e p (d+1) < 1";
      break;
    }
    case LllVariant::exponent: {
      if (s <= 1) throw Error(ErrorKind::invalid_parameter, "exponent variant needs s > 1");
      if (!s.get_num().fits_ulong_p() || !s.get_den().fits_ulong_p()) {
        throw Error(ErrorKind::invalid_parameter, "exponent " + to_string(s) + " is too large to decide exactly");
      }
      // p (e(d+1))^(a/b) < 1  <=>  p^b (e(d+1))^a < 1
      const unsigned long a = s.get_num().get_ui();
      const unsigned long b = s.get_den().get_ui();
      auto expr = [&](const Interval& e) {
        return Interval::exact(pow(p, b)) * pow(Interval::exact(d1) * e, a);
      };
      report.holds = p == 0 || certified_less(expr, 1);
      Interval value = expr(e_interval(64));
      report.lhs_lower = value.lo;
      report.lhs_upper = value.hi;
      report.inequality = "p^" + std::to_string(b) + " (e(d+1))^" + std::to_string(a) + " < 1";
      break;
    }
    case LllVariant::double_exp: {
      Rational value = p * pow(d1, d + 1);
      report.holds = value < 1;
      report.lhs_lower = value;
      report.lhs_upper = value;
      report.inequality = "p (d+1)^(d+1) < 1";
      break;
    }
  }
  return report;
}

QuotientCsp quotient_csp(const Csp& csp, const PartialLabeling& f) {
  if (f.size() != csp.num_variables()) throw Error(ErrorKind::invalid_input, "labeling size does not match the CSP");
  const std::size_t k = csp.num_labels();
  std::vector<Constraint> reduced;
  reduced.reserve(csp.num_constraints());
  for (const auto& con : csp.constraints()) {
    Constraint q;
    q.id = con.id;
    std::vector<std::size_t> free_positions;
    for (std::size_t j = 0; j < con.domain.size(); ++j) {
      const auto& value = f.get(con.domain[j]);
      if (value && *value >= k) throw Error(ErrorKind::invalid_input, "labeling uses an unknown label");
      if (!value) {
        free_positions.push_back(j);
        q.domain.push_back(con.domain[j]);
      }
    }
    for (AssignmentCode code : con.bad) {
      auto labels = decode_assignment(code, con.domain.size(), k);
      bool agrees = true;
      for (std::size_t j = 0; j < labels.size() && agrees; ++j) {
        const auto& value = f.get(con.domain[j]);
        agrees = !value || *value == labels[j];
      }
      if (!agrees) continue;
      AssignmentCode projected = 0;
      for (std::size_t j : free_positions) projected = projected * k + labels[j];
      q.bad.push_back(projected);
    }
    std::sort(q.bad.begin(), q.bad.end());
    reduced.push_back(std::move(q));
  }
  return QuotientCsp{csp, f, Csp(csp.num_variables(), csp.weights(), std::move(reduced), csp.materialization_cap())};
}

Csp proper_coloring_csp(const FiniteGraph& g, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::invalid_input, "proper coloring needs k >= 1");
  std::vector<std::vector<LabelId>> constant;
  for (LabelId l = 0; l < k; ++l) constant.push_back({l, l});
  std::vector<Constraint> constraints;
  for (auto [u, v] : g.edges()) constraints.push_back(make_constraint(constraints.size(), {u, v}, constant, k));
  return Csp::uniform(g.size(), k, std::move(constraints));
}

Csp sinkless_orientation_csp(const FiniteGraph& g) {
  const auto edges = g.edges();
  std::vector<std::vector<std::size_t>> incident(g.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].first].push_back(e);
    incident[edges[e].second].push_back(e);
  }
  std::vector<Constraint> constraints;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (incident[v].empty()) {
      throw Error(ErrorKind::invalid_input, "sinkless orientation needs no isolated vertices; vertex " + std::to_string(v) + " is isolated");
    }
    // The unique sink labeling: every incident edge points into v.
    std::vector<LabelId> sink;
    for (std::size_t e : incident[v]) sink.push_back(edges[e].second == v ? 0 : 1);
    constraints.push_back(make_constraint(v, incident[v], {sink}, 2));
  }
  return Csp::uniform(edges.size(), 2, std::move(constraints));
}

Csp hypergraph_2coloring_csp(const Hypergraph& h) {
  std::vector<Constraint> constraints;
  for (const auto& edge : h.hyperedges) {
    if (edge.empty()) throw Error(ErrorKind::invalid_input, "empty hyperedge");
    for (Vertex v : edge) {
      if (v >= h.n) throw Error(ErrorKind::invalid_input, "hyperedge vertex " + std::to_string(v) + " out of range");
    }
    std::vector<LabelId> zeros(edge.size(), 0), ones(edge.size(), 1);
    constraints.push_back(make_constraint(constraints.size(), edge, {zeros, ones}, 2));
  }
  return Csp::uniform(h.n, 2, std::move(constraints));
}

}  // namespace lll
