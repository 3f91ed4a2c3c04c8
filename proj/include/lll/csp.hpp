#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lll/graph.hpp"
#include "lll/rational.hpp"

namespace lll {

using VariableId = std::size_t;
using LabelId = std::size_t;
using ConstraintId = std::size_t;

/// Assignments over a constraint domain are encoded as mixed-radix integers
/// with the first (lowest-id) domain variable most significant, so integer
/// order is lexicographic order of the label tuples.
using AssignmentCode = std::uint64_t;

inline constexpr std::uint64_t kDefaultMaterializationCap = std::uint64_t{1} << 24;

struct Constraint {
  ConstraintId id = 0;
  std::vector<VariableId> domain;   // strictly increasing
  std::vector<AssignmentCode> bad;  // strictly increasing
};

/// Number of assignments num_labels^arity, or nullopt when it exceeds `cap`.
std::optional<std::uint64_t> assignment_space(std::size_t num_labels, std::size_t arity,
                                              std::uint64_t cap = kDefaultMaterializationCap);

AssignmentCode encode_assignment(std::span<const LabelId> labels, std::size_t num_labels);
std::vector<LabelId> decode_assignment(AssignmentCode code, std::size_t arity,
                                       std::size_t num_labels);

/// Variable-version CSP over variables 0..n-1 and labels 0..k-1 with a
/// product measure given by rational label weights.
class Csp {
 public:
  Csp() = default;

  /// Validates: weights in (0,1] summing exactly to 1, constraint ids equal to
  /// their index, domains strictly increasing and in range, bad codes sorted,
  /// unique and inside the assignment space (which must fit under `cap`).
  Csp(std::size_t num_variables, std::vector<Rational> weights, std::vector<Constraint> constraints,
      std::uint64_t cap = kDefaultMaterializationCap);

  static Csp uniform(std::size_t num_variables, std::size_t num_labels,
                     std::vector<Constraint> constraints,
                     std::uint64_t cap = kDefaultMaterializationCap);

  std::size_t num_variables() const { return num_variables_; }
  std::size_t num_labels() const { return weights_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(LabelId label) const { return weights_.at(label); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(ConstraintId c) const;
  std::uint64_t materialization_cap() const { return cap_; }

  /// |Lambda|^|dom(c)|.
  std::uint64_t assignment_count(ConstraintId c) const;
  bool is_bad(ConstraintId c, AssignmentCode code) const;

  /// dom^{-1}(v): constraints whose domain contains v, in id order.
  std::span<const ConstraintId> constraints_of(VariableId v) const {
    return constraints_of_.at(v);
  }

  friend bool operator==(const Csp& a, const Csp& b);

 private:
  std::size_t num_variables_ = 0;
  std::vector<Rational> weights_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<ConstraintId>> constraints_of_;
  std::uint64_t cap_ = kDefaultMaterializationCap;
};

bool operator==(const Constraint& a, const Constraint& b);

/// Builds a constraint from explicit bad label tuples given in domain order.
/// The domain may be unsorted; it is sorted and the tuples permuted to match.
Constraint make_constraint(ConstraintId id, std::vector<VariableId> domain,
                           const std::vector<std::vector<LabelId>>& bad_tuples,
                           std::size_t num_labels);

/// A labeling defined on a subset of the variables.
class PartialLabeling {
 public:
  PartialLabeling() = default;
  explicit PartialLabeling(std::size_t num_variables) : values_(num_variables) {}
  static PartialLabeling total(std::vector<LabelId> labels);

  std::size_t size() const { return values_.size(); }
  bool is_defined(VariableId v) const { return values_.at(v).has_value(); }
  LabelId at(VariableId v) const;
  const std::optional<LabelId>& get(VariableId v) const { return values_.at(v); }
  void set(VariableId v, LabelId label) { values_.at(v) = label; }
  void unset(VariableId v) { values_.at(v).reset(); }
  bool is_total() const;
  std::size_t defined_count() const;

  /// Labels of a total labeling; throws missing_variable otherwise.
  std::vector<LabelId> labels() const;

  friend bool operator==(const PartialLabeling&, const PartialLabeling&) = default;

 private:
  std::vector<std::optional<LabelId>> values_;
};

/// True iff f restricted to dom(c) is in Bad(c). Throws missing_variable if f
/// is undefined somewhere on dom(c).
bool violates(const Csp& csp, ConstraintId c, const PartialLabeling& f);

/// True iff f is total and violates no constraint.
bool is_solution(const Csp& csp, const PartialLabeling& f);

/// Product-measure mass of Bad(c).
Rational prob_bad(const Csp& csp, ConstraintId c);

/// Mass of the quotient bad set (Bad/f)(c): bad assignments agreeing with f
/// on the defined part of dom(c), weighted over the undefined variables.
Rational conditional_prob_bad(const Csp& csp, ConstraintId c, const PartialLabeling& f);

/// Dependency graph over constraint ids: c ~ c' iff their domains meet.
FiniteGraph dependency_graph(const Csp& csp);

/// Closed neighborhood N[c] in the dependency graph, in id order.
std::vector<ConstraintId> closed_neighborhood(const FiniteGraph& dependency, ConstraintId c);

struct CspStats {
  std::size_t order = 0;           // max |dom(c)|
  std::size_t vdeg = 0;            // max |dom^{-1}(v)|
  std::size_t max_dep_degree = 0;  // max degree of the dependency graph
  Rational p_max = 0;              // max prob_bad
};

CspStats csp_stats(const Csp& csp);

enum class LllVariant { classic, exponent, double_exp };

struct LllReport {
  bool holds = false;
  LllVariant variant = LllVariant::classic;
  /// Enclosure of the left-hand side; degenerate for double_exp.
  Rational lhs_lower;
  Rational lhs_upper;
  std::string inequality;
};

/// classic: e p (d+1) < 1; exponent: p (e(d+1))^s < 1 (s > 1 required);
/// double_exp: p (d+1)^(d+1) < 1. Decided exactly or by certified
/// enclosures of e.
LllReport lll_condition(const Rational& p, std::size_t d, LllVariant variant,
                        const Rational& s = Rational(0));

/// Pi/f: constraints keep their ids; domains lose the fixed variables and bad
/// sets become the compatible completions.
struct QuotientCsp {
  Csp base;
  PartialLabeling fixed;
  Csp reduced;
};

QuotientCsp quotient_csp(const Csp& csp, const PartialLabeling& f);

struct Hypergraph {
  std::size_t n = 0;
  std::vector<std::vector<Vertex>> hyperedges;
};

/// One constraint per edge (edge order of g.edges()), bad = k constant maps.
Csp proper_coloring_csp(const FiniteGraph& g, std::size_t k);

/// Variables are the edges of g in g.edges() order; label 0 orients the edge
/// from its lower to its higher endpoint, label 1 the other way. Constraint v
/// forbids v being a sink. Isolated vertices are rejected.
Csp sinkless_orientation_csp(const FiniteGraph& g);

/// One constraint per hyperedge forbidding both monochromatic labelings.
Csp hypergraph_2coloring_csp(const Hypergraph& h);

}  // namespace lll
