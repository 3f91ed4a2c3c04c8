#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lll/csp.hpp"
#include "lll/interval.hpp"
#include "lll/moser_tardos.hpp"

namespace lll {

struct LocalParams {
  ConstraintId c = 0;
  std::size_t R = 0;
  std::size_t N = 1;
  Rational eps;
  Rational eta;  // only used by the probability bound

  /// Throws invalid_parameter unless 0 < eps < 1 and N >= 1 (and 0 < eta < 1
  /// when eta is nonzero).
  void validate() const;
};

/// Pi_{c,r}: constraints outside B_D(c, r) get the full assignment set.
Csp local_csp(const Csp& csp, ConstraintId c, std::size_t r);

/// local_csp(c, r) plus an always-violated auxiliary constraint with id
/// num_constraints() and domain dom_{R-1}(c). Used to cross-check Folner
/// witnesses against single-sink witness digraphs.
Csp augmented_local_csp(const Csp& csp, ConstraintId c, std::size_t r, std::size_t R);

/// dom_R(c): union of dom(a) over a in B_D(c, R), sorted.
std::vector<VariableId> extended_domain(const Csp& csp, ConstraintId c, std::size_t R);

struct FolnerCounts {
  std::size_t inside = 0;   // sum |I_n ∩ B_D(c, r)|
  std::size_t outside = 0;  // sum |I_n \ B_D(c, r)|
};

FolnerCounts folner_counts(const MtSequence& seq, const Csp& csp, ConstraintId c, std::size_t r);

/// inside >= N and outside < eps * (inside + outside), decided exactly.
bool is_folner(const MtSequence& seq, const Csp& csp, ConstraintId c, std::size_t r,
               std::size_t N, const Rational& eps);

inline constexpr std::uint64_t kDefaultSearchNodeCap = 2'000'000;

struct LocalGoodnessResult {
  bool locally_good = true;
  std::optional<std::size_t> radius;  // r of the witness
  MtSequence witness;                 // singleton steps, empty when locally good
  std::uint64_t nodes = 0;            // search states expanded
};

/// Searches, for each r < R, for a (c,R)-bounded (c,r,N,eps)-Folner
/// MT-sequence consistent with (Pi_{c,r}, table) that only reads rows below
/// the table depth. Steps are singletons (independent steps split without
/// changing consistency). Throws budget_exceeded after `node_cap` states;
/// a verdict is never guessed.
LocalGoodnessResult is_locally_good(const Csp& csp, const Table& table, const LocalParams& params,
                                    std::uint64_t node_cap = kDefaultSearchNodeCap);

/// Column labels of the meta-CSP: a label id encodes `depth` rows in base
/// |Lambda|, row 0 most significant.
std::vector<LabelId> decode_column(LabelId column, std::size_t depth, std::size_t num_labels);
LabelId encode_column(std::span<const LabelId> rows, std::size_t num_labels);

/// Membership of a column assignment on dom_R(c) in LBad_{R,N,eps}(c). The
/// columns are given in extended_domain order; other variables use column 0.
bool lbad_contains(const Csp& csp, std::size_t R, std::size_t N, const Rational& eps,
                   std::size_t depth, ConstraintId c, std::span<const LabelId> columns,
                   std::uint64_t node_cap = kDefaultSearchNodeCap);

/// LG(R, N, eps) with explicit LBad sets. Labels are depth-`depth` columns
/// with product weights. Throws cap_exceeded when a constraint's assignment
/// space exceeds `cap`.
Csp build_lg_csp(const Csp& csp, std::size_t R, std::size_t N, const Rational& eps,
                 std::size_t depth, std::uint64_t cap = kDefaultMaterializationCap,
                 std::uint64_t node_cap = kDefaultSearchNodeCap);

/// Converts meta-CSP labels (columns) back into a table.
Table table_from_columns(const PartialLabeling& columns, std::size_t depth,
                         std::size_t num_labels);

struct LgDegreeReport {
  std::size_t max_degree = 0;
  std::size_t bound = 0;  // gamma_D(2R) - 1
  bool pass = false;
  std::size_t reach_bound = 0;  // gamma_D(2R+1) - 1: meta-domains meet within distance 2R+1
  bool within_reach = false;
};

LgDegreeReport lg_degree_check(const Csp& csp, std::size_t R);

/// R * eta / (xi (1 - eta) (1 + eta)^N) with xi = eta (1 - zeta)^gammaR and
/// zeta = 1/(d+1) for d > 0, 1/e for d = 0. Exact (lo == hi) for d > 0.
Interval lbad_bound(std::size_t d, const Rational& eta, std::size_t R, std::size_t gammaR,
                    std::size_t N);

/// zeta(d) as an enclosure, and whether zeta (1-zeta)^d >= 1/(e(d+1)) holds.
Interval zeta_value(std::size_t d);
bool zeta_condition(std::size_t d);

struct HypothesisReport {
  bool lll_exponent = false;   // p (e(d+1))^s < 1
  bool eps_plus_inverse_s = false;  // eps + 1/s < 1
  bool eta_bound = false;      // p^(1-eps-1/s) <= (1-eta)/(1+eta)
  bool holds() const { return lll_exponent && eps_plus_inverse_s && eta_bound; }
};

HypothesisReport check_lbad_hypotheses(const Rational& p, std::size_t d, const Rational& s,
                                       const Rational& eps, const Rational& eta);

/// x^(num/den) <= y for nonnegative x, y and positive num/den, decided exactly.
bool rational_power_less_equal(const Rational& x, const Rational& exponent, const Rational& y);

struct LbadEstimate {
  std::size_t trials = 0;
  std::size_t bad = 0;      // tables found not locally good
  std::size_t unknown = 0;  // search budget exhausted
  double frequency = 0.0;   // (bad + unknown) / trials
  Interval bound;
  double sigma = 0.0;
  bool pass = false;
  HypothesisReport hypotheses;
};

/// Monte Carlo frequency of LBad_{R,N,eps}(c) over sample_table draws versus
/// lbad_bound(d, eta, R, gamma_D(R), N). Throws hypothesis_violated if the
/// supplied (p, d, s, eps, eta) fail the hypotheses or p, d do not dominate
/// the instance.
LbadEstimate estimate_lbad_prob(const Csp& csp, const LocalParams& params, std::size_t depth,
                                std::size_t trials, std::uint64_t seed, const Rational& p,
                                std::size_t d, const Rational& s, std::size_t jobs = 1,
                                std::uint64_t node_cap = kDefaultSearchNodeCap);

}  // namespace lll
