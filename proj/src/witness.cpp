#include "lll/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "lll/error.hpp"

namespace lll {

WitnessDigraph::WitnessDigraph(std::vector<ConstraintId> decoration, std::vector<Edge> edges)
    : decoration_(std::move(decoration)), edges_(std::move(edges)), in_(decoration_.size()), out_(decoration_.size()) {
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto [from, to] = edges_[i];
    if (from >= size() || to >= size()) throw Error(ErrorKind::invalid_input, "witness edge endpoint out of range");
    if (from == to) throw Error(ErrorKind::invalid_input, "witness digraph has a self-loop");
    if (i > 0 && edges_[i - 1] == edges_[i]) throw Error(ErrorKind::invalid_input, "witness digraph has a duplicate edge");
    out_[from].push_back(to);
    in_[to].push_back(from);
  }
  for (auto& list : in_) std::sort(list.begin(), list.end());
}

bool WitnessDigraph::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

std::vector<std::size_t> WitnessDigraph::sinks() const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < size(); ++x) {
    if (out_[x].empty()) out.push_back(x);
  }
  return out;
}

namespace {

bool in_closed_neighborhood(const FiniteGraph& dep, ConstraintId a, ConstraintId b) {
  return a == b || dep.has_edge(a, b);
}

bool acyclic(const WitnessDigraph& g) {
  std::vector<std::size_t> indegree(g.size());
  for (auto [from, to] : g.edges()) ++indegree[to];
  std::vector<std::size_t> ready;
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (indegree[x] == 0) ready.push_back(x);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t x = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t y : g.out_neighbors(x)) {
      if (--indegree[y] == 0) ready.push_back(y);
    }
  }
  return seen == g.size();
}

}  // namespace

WitnessDigraph full_witness_digraph(const MtSequence& seq, const Csp& csp) {
  const FiniteGraph dep = dependency_graph(csp);
  require_independent_steps(seq, dep);
  std::vector<ConstraintId> decoration;
  std::vector<std::size_t> step_of;
  for (std::size_t n = 0; n < seq.steps.size(); ++n) {
    std::vector<ConstraintId> step = seq.steps[n];
    std::sort(step.begin(), step.end());
    for (ConstraintId c : step) {
      decoration.push_back(c);
      step_of.push_back(n);
    }
  }
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < decoration.size(); ++x) {
    for (std::size_t y = 0; y < decoration.size(); ++y) {
      if (step_of[x] < step_of[y] && in_closed_neighborhood(dep, decoration[x], decoration[y])) edges.emplace_back(x, y);
    }
  }
  return WitnessDigraph(std::move(decoration), std::move(edges));
}

bool validate_witness(const WitnessDigraph& g, const Csp& csp) {
  for (ConstraintId c : g.decorations()) {
    if (c >= csp.num_constraints()) return false;
  }
  if (!acyclic(g)) return false;
  const FiniteGraph dep = dependency_graph(csp);
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      bool joined = g.has_edge(x, y) || g.has_edge(y, x);
      if (joined != in_closed_neighborhood(dep, g.decoration(x), g.decoration(y))) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::size_t>> witness_levels(const WitnessDigraph& g, const Csp& csp) {
  std::vector<std::vector<std::size_t>> levels(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto& domain = csp.constraint(g.decoration(x)).domain;
    levels[x].assign(domain.size(), 0);
    for (std::size_t y : g.in_neighbors(x)) {
      const auto& other = csp.constraint(g.decoration(y)).domain;
      for (std::size_t j = 0; j < domain.size(); ++j) {
        if (std::binary_search(other.begin(), other.end(), domain[j])) ++levels[x][j];
      }
    }
  }
  return levels;
}

bool compatibility_check(const WitnessDigraph& g, const Csp& csp, const Table& table) {
  if (!validate_witness(g, csp)) throw Error(ErrorKind::invalid_input, "not a witness digraph for this CSP");
  const auto levels = witness_levels(g, csp);
  for (std::size_t x = 0; x < g.size(); ++x) {
    const Constraint& con = csp.constraint(g.decoration(x));
    AssignmentCode code = 0;
    for (std::size_t j = 0; j < con.domain.size(); ++j) {
      code = code * csp.num_labels() + table.at(con.domain[j], levels[x][j]);
    }
    if (!csp.is_bad(con.id, code)) return false;
  }
  return true;
}

namespace {

std::vector<std::size_t> refine_colors(const WitnessDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> color(n);
  {
    std::vector<ConstraintId> distinct = g.decorations();
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t x = 0; x < n; ++x) {
      color[x] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), g.decoration(x)) - distinct.begin());
    }
  }
  std::size_t classes = 0;
  for (;;) {
    using Signature = std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::size_t>>;
    std::vector<Signature> sig(n);
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<std::size_t> outs, ins;
      for (std::size_t y : g.out_neighbors(x)) outs.push_back(color[y]);
      for (std::size_t y : g.in_neighbors(x)) ins.push_back(color[y]);
      std::sort(outs.begin(), outs.end());
      std::sort(ins.begin(), ins.end());
      sig[x] = Signature{color[x], std::move(outs), std::move(ins)};
    }
    std::vector<Signature> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t x = 0; x < n; ++x) {
      color[x] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), sig[x]) - distinct.begin());
    }
    if (distinct.size() == classes) break;
    classes = distinct.size();
  }
  return color;
}

CanonicalKey encode(const WitnessDigraph& g, const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  CanonicalKey key;
  key.reserve(1 + n + n * n);
  key.push_back(n);
  for (std::size_t x : order) key.push_back(g.decoration(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) key.push_back(g.has_edge(order[i], order[j]) ? 1 : 0);
  }
  return key;
}

std::pair<CanonicalKey, std::vector<std::size_t>> canonical_order(const WitnessDigraph& g) {
  const auto color = refine_colors(g);
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return color[a] != color[b] ? color[a] < color[b] : a < b;
  });
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && color[order[j]] == color[order[i]]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  CanonicalKey best;
  std::vector<std::size_t> best_order;
  auto visit = [&](auto&& self, std::size_t block) -> void {
    if (block == blocks.size()) {
      CanonicalKey key = encode(g, order);
      if (best_order.empty() || key < best) {
        best = std::move(key);
        best_order = order;
      }
      return;
    }
    auto begin = order.begin() + static_cast<std::ptrdiff_t>(blocks[block].first);
    auto end = order.begin() + static_cast<std::ptrdiff_t>(blocks[block].second);
    std::sort(begin, end);
    do {
      self(self, block + 1);
    } while (std::next_permutation(begin, end));
  };
  visit(visit, 0);
  if (g.size() == 0) best = encode(g, order);
  return {best, best_order};
}

}  // namespace

CanonicalKey canonical_form(const WitnessDigraph& g) { return canonical_order(g).first; }

bool isomorphic(const WitnessDigraph& a, const WitnessDigraph& b) {
  return a.size() == b.size() && a.edges().size() == b.edges().size() && canonical_form(a) == canonical_form(b);
}

WitnessDigraph canonical_representative(const WitnessDigraph& g) {
  const auto order = canonical_order(g).second;
  std::vector<std::size_t> position(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  std::vector<ConstraintId> decoration;
  for (std::size_t x : order) decoration.push_back(g.decoration(x));
  std::vector<Edge> edges;
  for (auto [from, to] : g.edges()) edges.emplace_back(position[from], position[to]);
  return WitnessDigraph(std::move(decoration), std::move(edges));
}

std::vector<WitnessDigraph> enumerate_sink_star(ConstraintId c, const Csp& csp, std::size_t max_vertices, std::size_t cap) {
  if (c >= csp.num_constraints()) throw Error(ErrorKind::invalid_input, "unknown constraint " + std::to_string(c));
  std::vector<WitnessDigraph> result;
  if (max_vertices == 0) return result;
  const FiniteGraph dep = dependency_graph(csp);
  std::vector<WitnessDigraph> frontier{WitnessDigraph({c}, {})};
  result.push_back(frontier.front());
  for (std::size_t size = 1; size < max_vertices; ++size) {
    std::map<CanonicalKey, WitnessDigraph> next;
    for (const auto& g : frontier) {
      std::set<ConstraintId> candidates;
      for (ConstraintId d : g.decorations()) {
        for (ConstraintId a : closed_neighborhood(dep, d)) candidates.insert(a);
      }
      for (ConstraintId a : candidates) {
        std::vector<ConstraintId> decoration = g.decorations();
        decoration.push_back(a);
        std::vector<Edge> edges = g.edges();
        const std::size_t x = g.size();
        for (std::size_t y = 0; y < g.size(); ++y) {
          if (in_closed_neighborhood(dep, a, g.decoration(y))) edges.emplace_back(x, y);
        }
        WitnessDigraph grown(std::move(decoration), std::move(edges));
        auto [key, order] = canonical_order(grown);
        if (next.count(key)) continue;
        if (result.size() + next.size() >= cap) {
          throw Error(ErrorKind::cap_exceeded, "more than " + std::to_string(cap) + " single-sink witness digraphs");
        }
        next.emplace(std::move(key), canonical_representative(grown));
      }
    }
    frontier.clear();
    for (auto& [key, g] : next) frontier.push_back(std::move(g));
    result.insert(result.end(), frontier.begin(), frontier.end());
    if (frontier.empty()) break;
  }
  return result;
}

Mt1Report verify_mt1(const WitnessDigraph& g, const Csp& csp, const Mt1Mode& mode) {
  if (!validate_witness(g, csp)) throw Error(ErrorKind::invalid_input, "not a witness digraph for this CSP");
  Mt1Report report;
  report.rhs = 1;
  for (ConstraintId c : g.decorations()) report.rhs *= prob_bad(csp, c);

  const auto levels = witness_levels(g, csp);
  std::map<std::pair<VariableId, std::size_t>, std::size_t> cells;
  std::vector<std::vector<std::size_t>> cell_of(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto& domain = csp.constraint(g.decoration(x)).domain;
    for (std::size_t j = 0; j < domain.size(); ++j) {
      auto [it, inserted] = cells.emplace(std::pair{domain[j], levels[x][j]}, cells.size());
      cell_of[x].push_back(it->second);
    }
  }
  report.relevant_cells = cells.size();

  if (const auto* exact = std::get_if<mt1::Exact>(&mode)) {
    for (const auto& [cell, index] : cells) {
      if (cell.second >= exact->depth) {
        throw Error(ErrorKind::depth_exceeded, "witness reads row " + std::to_string(cell.second) + " beyond depth " +
                                                   std::to_string(exact->depth));
      }
    }
    const std::size_t k = csp.num_labels();
    auto space = assignment_space(k, cells.size(), exact->cap);
    if (!space) throw Error(ErrorKind::cap_exceeded, "too many relevant cells for exact enumeration");
    Rational total = 0;
    for (AssignmentCode code = 0; code < *space; ++code) {
      auto labels = decode_assignment(code, cells.size(), k);
      bool compatible = true;
      for (std::size_t x = 0; x < g.size() && compatible; ++x) {
        AssignmentCode local = 0;
        for (std::size_t cell : cell_of[x]) local = local * k + labels[cell];
        compatible = csp.is_bad(g.decoration(x), local);
      }
      if (!compatible) continue;
      Rational mass = 1;
      for (LabelId l : labels) mass *= csp.weight(l);
      total += mass;
    }
    report.lhs = total;
    report.pass = report.lhs == report.rhs;
    return report;
  }

  const auto& mc = std::get<mt1::MonteCarlo>(mode);
  if (mc.trials == 0) throw Error(ErrorKind::invalid_parameter, "Monte Carlo mode needs at least one trial");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < mc.trials; ++t) {
    if (compatibility_check(g, csp, sample_table(csp, mc.depth, mc.seed, t))) ++hits;
  }
  report.lhs = Rational(static_cast<unsigned long>(hits), static_cast<unsigned long>(mc.trials));
  report.lhs.canonicalize();
  const double q = to_double(report.rhs);
  report.sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(mc.trials));
  report.pass = std::abs(to_double(report.lhs) - q) <= 4.0 * report.sigma || report.lhs == report.rhs;
  return report;
}

Mt2Report verify_mt2_partial_sums(ConstraintId c, const Csp& csp, const std::vector<Rational>& alpha,
                                  const std::vector<Rational>& beta, std::size_t max_vertices, std::size_t cap) {
  const std::size_t m = csp.num_constraints();
  if (alpha.size() != m || beta.size() != m) throw Error(ErrorKind::invalid_input, "alpha and beta need one entry per constraint");
  if (c >= m) throw Error(ErrorKind::invalid_input, "unknown constraint " + std::to_string(c));
  const FiniteGraph dep = dependency_graph(csp);
  for (ConstraintId a = 0; a < m; ++a) {
    if (alpha[a] < 0 || beta[a] < 0 || beta[a] >= 1) {
      throw Error(ErrorKind::invalid_parameter, "alpha must be nonnegative and beta in [0,1)");
    }
    Rational rhs = beta[a];
    for (Vertex b : dep.neighbors(a)) rhs *= 1 - beta[b];
    if (alpha[a] > rhs) {
      throw Error(ErrorKind::hypothesis_violated,
                  "alpha(" + std::to_string(a) + ") = " + to_string(alpha[a]) + " exceeds beta(a) prod (1 - beta(b)) = " + to_string(rhs));
    }
  }
  Mt2Report report;
  report.bound = beta[c] / (1 - beta[c]);
  const auto reps = enumerate_sink_star(c, csp, max_vertices, cap);
  report.representatives = reps.size();
  report.partial_sum = 0;
  for (const auto& g : reps) {
    Rational term = 1;
    for (ConstraintId a : g.decorations()) term *= alpha[a];
    report.partial_sum += term;
  }
  report.pass = report.partial_sum <= report.bound;
  return report;
}

}  // namespace lll
