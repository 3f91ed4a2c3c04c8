#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "lll/csp.hpp"
#include "lll/moser_tardos.hpp"

namespace lll {

/// Finite simple digraph whose vertices are decorated by constraint ids.
class WitnessDigraph {
 public:
  WitnessDigraph() = default;

  /// Throws invalid_input on out-of-range endpoints, self-loops or duplicate
  /// edges.
  WitnessDigraph(std::vector<ConstraintId> decoration, std::vector<Edge> edges);

  std::size_t size() const { return decoration_.size(); }
  ConstraintId decoration(std::size_t x) const { return decoration_.at(x); }
  const std::vector<ConstraintId>& decorations() const { return decoration_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const std::size_t> in_neighbors(std::size_t x) const { return in_.at(x); }
  std::span<const std::size_t> out_neighbors(std::size_t x) const { return out_.at(x); }
  bool has_edge(std::size_t from, std::size_t to) const;
  std::vector<std::size_t> sinks() const;

  friend bool operator==(const WitnessDigraph& a, const WitnessDigraph& b) {
    return a.decoration_ == b.decoration_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<ConstraintId> decoration_;
  std::vector<Edge> edges_;  // sorted
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::vector<std::size_t>> out_;
};

/// Gamma(I): one vertex per (step, constraint) in lexicographic order, edge
/// (n,c) -> (n',c') iff n < n' and c in N[c']. Throws non_independent when a
/// step is not independent in the dependency graph.
WitnessDigraph full_witness_digraph(const MtSequence& seq, const Csp& csp);

/// Acyclic, and for x != y: an edge joins them (in either direction) iff
/// delta(x) in N[delta(y)].
bool validate_witness(const WitnessDigraph& g, const Csp& csp);

/// k(x, v) = number of in-neighbors y of x with v in dom(delta(y)); the row of
/// tau(v, .) that the vertex x reads. Indexed like dom(delta(x)).
std::vector<std::vector<std::size_t>> witness_levels(const WitnessDigraph& g, const Csp& csp);

/// Level-counting criterion: for every vertex x, the assignment
/// v -> tau(v, k(x, v)) lies in Bad(delta(x)). Throws invalid_input if g is
/// not a witness digraph and depth_exceeded if a level reaches the depth.
bool compatibility_check(const WitnessDigraph& g, const Csp& csp, const Table& table);

/// Canonical form of a decorated digraph: equal iff isomorphic
/// (decoration-preserving).
using CanonicalKey = std::vector<std::uint64_t>;
CanonicalKey canonical_form(const WitnessDigraph& g);
bool isomorphic(const WitnessDigraph& a, const WitnessDigraph& b);

/// Relabels g so that its vertex order is the canonical one.
WitnessDigraph canonical_representative(const WitnessDigraph& g);

inline constexpr std::size_t kDefaultEnumerationCap = 200000;

/// One representative per isomorphism class of single-sink witness digraphs
/// with sink decorated c and at most max_vertices vertices, ordered by size
/// and then canonical key. Throws cap_exceeded past `cap` representatives.
std::vector<WitnessDigraph> enumerate_sink_star(ConstraintId c, const Csp& csp,
                                                std::size_t max_vertices,
                                                std::size_t cap = kDefaultEnumerationCap);

namespace mt1 {
struct Exact {
  std::size_t depth = 0;
  std::uint64_t cap = kDefaultMaterializationCap;
};
struct MonteCarlo {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
};
}  // namespace mt1

using Mt1Mode = std::variant<mt1::Exact, mt1::MonteCarlo>;

struct Mt1Report {
  Rational lhs;  // exact probability, or observed frequency as a rational
  Rational rhs;  // product of prob_bad over the decorations
  bool pass = false;
  std::size_t relevant_cells = 0;
  double sigma = 0.0;  // Monte Carlo only
};

/// Compares P[g compatible with (csp, tau)] against prod_x P[Bad(delta(x))].
/// Exact mode enumerates the table cells the criterion reads; Monte Carlo
/// mode passes within 4 binomial standard deviations.
Mt1Report verify_mt1(const WitnessDigraph& g, const Csp& csp, const Mt1Mode& mode);

struct Mt2Report {
  Rational partial_sum;
  Rational bound;  // beta(c) / (1 - beta(c))
  bool pass = false;
  std::size_t representatives = 0;
};

/// Checks alpha(a) <= beta(a) prod_{b in N(a)} (1 - beta(b)) for every a
/// (hypothesis_violated otherwise), then sums prod_x alpha(delta(x)) over
/// enumerate_sink_star(c, csp, max_vertices).
Mt2Report verify_mt2_partial_sums(ConstraintId c, const Csp& csp,
                                  const std::vector<Rational>& alpha,
                                  const std::vector<Rational>& beta, std::size_t max_vertices,
                                  std::size_t cap = kDefaultEnumerationCap);

}  // namespace lll
