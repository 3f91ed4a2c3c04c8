#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lll/csp.hpp"
#include "lll/graph.hpp"
#include "lll/local_goodness.hpp"
#include "lll/moser_tardos.hpp"

namespace lll {

/// Labels each constraint with the lexicographically first assignment outside
/// its bad set; unconstrained variables get label 0. Requires an edgeless
/// dependency graph (precondition_violated otherwise) and prob_bad < 1
/// everywhere (unsatisfiable otherwise).
PartialLabeling solve_edgeless(const Csp& csp);

/// Conditional-probability step for one D^2-independent class. For each class
/// member c (id order) the first assignment phi of the still-unlabeled part of
/// dom(c), in lexicographic order, with
///   P[(Bad/(f+phi))(a)] <= (d+1) P[(Bad/f)(a)] for all a in N[c]
/// is chosen, where f = q.fixed and d is the maximum degree of the base
/// dependency graph. Returns only the new labels.
PartialLabeling induction_step(const QuotientCsp& q, std::span<const ConstraintId> color_class);

struct MassLedgerStep {
  std::vector<ConstraintId> color_class;
  std::vector<Rational> masses;            // P[(Bad/f_{1..i})(a)] for every a
  std::vector<std::size_t> touch_counts;   // |{j <= i : a in N[I_j]}|
};

struct DoubleExpResult {
  PartialLabeling labeling;
  std::vector<Rational> initial_masses;
  std::vector<MassLedgerStep> ledger;
  std::size_t d = 0;
  Rational p;
  std::size_t classes = 0;
};

/// Deterministic solver under p (d+1)^(d+1) < 1 with p = max prob_bad and
/// d = max degree of the dependency graph: greedy-colors D^2, runs
/// induction_step class by class on successive quotients, and labels leftover
/// variables 0. Throws precondition_violated if the inequality fails.
DoubleExpResult solve_double_exp(const Csp& csp);

/// True iff every ledger step satisfies the per-class (d+1) factor and the
/// cumulative (d+1)^k bound exactly.
bool ledger_is_sound(const DoubleExpResult& result, const Csp& csp);

struct PipelineParams {
  Rational p;
  std::size_t d = 0;
  Rational s;
  Rational eps;
  Rational eta;
  std::size_t R = 1;
  std::size_t N = 1;
  std::size_t depth = 1;
};

struct AdvisorReport {
  PipelineParams params;
  bool lll_exponent_holds = false;
  Rational growth_target;        // 1/(1-eps), strictly between the proxy and s
  std::size_t gamma_R = 0;
  std::size_t gamma_2R = 0;
  Interval F;                    // F(d, eta, R)
  double log2_N_threshold = 0;   // log2(F * gamma_2R^gamma_2R)
  double log2_materialization_lower = 0;
  bool desk_feasible = false;
  std::string verdict;
};

/// Chooses (eps, R, eta, N) for a dependency graph with growth profile
/// `growth`: eps from the midpoint between a rational upper bound of the
/// growth proxy and s (unless `eps_override` is given), the least profiled R
/// with gamma(R) < (1-eps)^-R, eta the largest power of 1/2 with
/// (1-eta)/(1+eta) > p^(1-eps-1/s), and the least N with
/// (1+eta)^N > F(d,eta,R) gamma(2R)^gamma(2R) (using the upper end of F).
/// Throws hypothesis_violated naming the failing inequality, or
/// invalid_parameter when no profiled R works.
AdvisorReport parameter_advisor(const Rational& p, std::size_t d, const Rational& s,
                                const GrowthProfile& growth,
                                const std::optional<Rational>& eps_override = std::nullopt,
                                std::uint64_t cap = kDefaultMaterializationCap);

/// Least R in 1..max_radius with gamma(R) (1-eps)^R < 1.
std::optional<std::size_t> least_valid_radius(const GrowthProfile& growth, const Rational& eps);

namespace pipeline_mode {
struct Deterministic {};
struct Randomized {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
};
}  // namespace pipeline_mode

using PipelineMode = std::variant<pipeline_mode::Deterministic, pipeline_mode::Randomized>;

struct PipelineResult {
  PartialLabeling solution;
  Table table;
  std::size_t attempts = 0;
  std::size_t lg_max_degree = 0;
  Rational lg_p_max;
  RunTrace run;
  std::vector<std::string> provenance;
};

struct PipelineLimits {
  std::uint64_t materialization_cap = kDefaultMaterializationCap;
  std::uint64_t node_cap = kDefaultSearchNodeCap;
};

/// Deterministic: builds LG(R,N,eps) explicitly, solves it with
/// solve_double_exp to get a locally good table, re-verifies local goodness,
/// then runs the maximal algorithm on that table. Randomized: samples tables
/// until one is locally good for every constraint and the maximal algorithm
/// completes on it. Throws infeasible when a cap blocks the deterministic leg
/// and unsatisfiable when no randomized attempt succeeds.
PipelineResult pipeline(const Csp& csp, const PipelineParams& params, const PipelineMode& mode,
                        const PipelineLimits& limits = {});

}  // namespace lll
