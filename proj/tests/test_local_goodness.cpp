#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "lll/error.hpp"
#include "lll/local_goodness.hpp"
#include "oracles.hpp"

using namespace lll;

namespace {

FiniteGraph path(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return FiniteGraph(n, edges);
}

FiniteGraph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return FiniteGraph(n, edges);
}

std::size_t lg_degree_by_hand(const Csp& csp, std::size_t R) {
  const std::size_t m = csp.num_constraints();
  const FiniteGraph dep = dependency_graph(csp);
  std::vector<std::set<VariableId>> vars(m);
  for (ConstraintId c = 0; c < m; ++c) {
    for (auto a : ball(dep, c, R)) {
      for (auto v : csp.constraint(a).domain) vars[c].insert(v);
    }
  }
  std::size_t best = 0;
  for (ConstraintId a = 0; a < m; ++a) {
    std::size_t degree = 0;
    for (ConstraintId b = 0; b < m; ++b) {
      bool meet = false;
      for (auto v : vars[a]) meet = meet || vars[b].count(v);
      degree += a != b && meet;
    }
    best = std::max(best, degree);
  }
  return best;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((LocalParams{0, 1, 1, 0, 0}.validate()), Error);
  CHECK_THROWS_AS((LocalParams{0, 1, 0, Rational(1, 2), 0}.validate()), Error);
  CHECK_THROWS_AS((LocalParams{0, 1, 1, Rational(1, 2), 1}.validate()), Error);
  CHECK_NOTHROW((LocalParams{0, 1, 1, Rational(1, 2), 0}.validate()));
}

TEST_CASE("local CSP frees constraints outside the ball") {
  Csp csp = proper_coloring_csp(path(5), 2);
  Csp local = local_csp(csp, 0, 1);
  CHECK(local.constraint(0).bad == csp.constraint(0).bad);
  CHECK(local.constraint(1).bad == csp.constraint(1).bad);
  CHECK(prob_bad(local, 2) == 1);
  CHECK(prob_bad(local, 3) == 1);
  CHECK(extended_domain(csp, 0, 1) == std::vector<VariableId>{0, 1, 2});
  Csp augmented = augmented_local_csp(csp, 1, 0, 2);
  CHECK(augmented.num_constraints() == 5);
  CHECK(augmented.constraint(4).domain == std::vector<VariableId>{0, 1, 2, 3});
  CHECK(prob_bad(augmented, 4) == 1);
}

TEST_CASE("Folner counts") {
  Csp csp = proper_coloring_csp(path(5), 2);
  MtSequence seq{{{0}, {1}, {0, 3}}};
  auto counts = folner_counts(seq, csp, 0, 1);
  CHECK(counts.inside == 3);
  CHECK(counts.outside == 1);
  CHECK(is_folner(seq, csp, 0, 1, 3, Rational(1, 3)));
  CHECK_FALSE(is_folner(seq, csp, 0, 1, 3, Rational(1, 4)));
  CHECK_FALSE(is_folner(seq, csp, 0, 1, 4, Rational(1, 2)));
}

TEST_CASE("local goodness search agrees with plain enumeration") {
  std::mt19937_64 rng(29);
  const Rational eps_values[] = {Rational(1, 3), Rational(1, 2), Rational(3, 4)};
  std::size_t good = 0, bad = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Csp csp = oracle::random_csp(rng, 4, 3, 2, 0.4);
    const std::size_t depth = 2 + trial % 2;
    Table table = oracle::random_table(rng, 4, depth, 2);
    LocalParams params{static_cast<ConstraintId>(trial % 3), 1 + static_cast<std::size_t>(trial % 2),
                       1 + static_cast<std::size_t>(trial % 3), eps_values[trial % 3], 0};
    auto result = is_locally_good(csp, table, params);
    CHECK(result.locally_good == oracle::locally_good(csp, table, params));
    if (result.locally_good) {
      ++good;
      continue;
    }
    ++bad;
    REQUIRE(result.radius.has_value());
    CHECK(*result.radius < params.R);
    CHECK(is_folner(result.witness, csp, params.c, *result.radius, params.N, params.eps));
    Csp local = local_csp(csp, params.c, *result.radius);
    CHECK(check_consistency(local, table, result.witness));
    auto outer = ball(dependency_graph(csp), params.c, params.R);
    for (const auto& step : result.witness.steps) {
      REQUIRE(step.size() == 1);
      CHECK(std::binary_search(outer.begin(), outer.end(), step[0]));
    }
  }
  CHECK(good > 20);
  CHECK(bad > 20);
}

TEST_CASE("search budget is reported, not guessed") {
  const std::size_t offsets[] = {1, 2};
  Csp csp = sinkless_orientation_csp(circulant_graph(10, offsets));
  Table table = sample_table(csp, 8, 1, 0);
  CHECK_THROWS_AS(is_locally_good(csp, table, LocalParams{0, 2, 3, Rational(1, 24), 0}, 1), Error);
}

TEST_CASE("column codec") {
  for (LabelId col = 0; col < 27; ++col) CHECK(encode_column(decode_column(col, 3, 3), 3) == col);
  CHECK(decode_column(1, 3, 2) == std::vector<LabelId>{0, 0, 1});
}

TEST_CASE("explicit LG CSP on a tiny instance") {
  Csp csp(2, {Rational(1, 3), Rational(2, 3)},
          {make_constraint(0, {0}, {{0}}, 2), make_constraint(1, {0, 1}, {{1, 1}}, 2)});
  const std::size_t depth = 2;
  Csp lg = build_lg_csp(csp, 1, 1, Rational(1, 2), depth);
  CHECK(lg.num_labels() == 4);
  CHECK(lg.weight(0) == Rational(1, 9));
  CHECK(lg.weight(3) == Rational(4, 9));
  for (ConstraintId c = 0; c < 2; ++c) {
    const auto& con = lg.constraint(c);
    CHECK(con.domain == extended_domain(csp, c, 1));
    for (AssignmentCode code = 0; code < lg.assignment_count(c); ++code) {
      auto columns = decode_assignment(code, con.domain.size(), 4);
      PartialLabeling f(2);
      for (std::size_t i = 0; i < columns.size(); ++i) f.set(con.domain[i], columns[i]);
      for (VariableId v = 0; v < 2; ++v) {
        if (!f.is_defined(v)) f.set(v, 0);
      }
      Table table = table_from_columns(f, depth, 2);
      bool not_good = !oracle::locally_good(csp, table, LocalParams{c, 1, 1, Rational(1, 2), 0});
      CHECK(lg.is_bad(c, code) == not_good);
    }
  }
  CHECK_THROWS_AS(build_lg_csp(csp, 1, 1, Rational(1, 2), 5, 16), Error);
}

TEST_CASE("LG dependency degree") {
  std::vector<Csp> family{proper_coloring_csp(path(6), 3), proper_coloring_csp(cycle(7), 3),
                          sinkless_orientation_csp(cycle(8))};
  const std::size_t offsets[] = {1, 2};
  family.push_back(sinkless_orientation_csp(circulant_graph(10, offsets)));
  for (const auto& csp : family) {
    for (std::size_t R = 1; R <= 3; ++R) {
      auto report = lg_degree_check(csp, R);
      CHECK(report.within_reach);
      CHECK(report.max_degree == lg_degree_by_hand(csp, R));
      CHECK(report.pass == (report.max_degree <= report.bound));
    }
  }
  // meta-domains of constraints 2R+1 apart on a long cycle still share a variable
  auto ring = lg_degree_check(sinkless_orientation_csp(cycle(12)), 1);
  CHECK(ring.max_degree == 6);
  CHECK(ring.bound == 4);
  CHECK_FALSE(ring.pass);
}

TEST_CASE("probability bound and hypotheses") {
  CHECK(lbad_bound(4, Rational(1, 2), 1, 5, 0).lo == Rational(3125, 512));
  CHECK(lbad_bound(4, Rational(1, 2), 1, 5, 0).hi == Rational(3125, 512));
  Interval zero_degree = lbad_bound(0, Rational(1, 2), 1, 1, 0);
  CHECK(zero_degree.lo < zero_degree.hi);
  for (std::size_t d = 0; d < 12; ++d) CHECK(zeta_condition(d));
  CHECK(rational_power_less_equal(Rational(1, 4), Rational(1, 2), Rational(1, 2)));
  CHECK_FALSE(rational_power_less_equal(Rational(1, 4), Rational(1, 2), Rational(49, 100)));
  auto h = check_lbad_hypotheses(Rational(1, 16), 4, Rational(21, 20), Rational(1, 24), Rational(1, 128));
  CHECK(h.holds());
  auto loose = check_lbad_hypotheses(Rational(1, 16), 4, Rational(21, 20), Rational(1, 24), Rational(1, 64));
  CHECK(loose.lll_exponent);
  CHECK_FALSE(loose.eta_bound);
  CHECK_FALSE(check_lbad_hypotheses(Rational(1, 16), 4, Rational(21, 20), Rational(1, 20), Rational(1, 128)).eps_plus_inverse_s);
}

TEST_CASE("Monte Carlo bad-table estimate") {
  const std::size_t offsets[] = {1, 2};
  Csp csp = sinkless_orientation_csp(circulant_graph(10, offsets));
  LocalParams params{0, 1, 2, Rational(1, 24), Rational(1, 128)};
  auto one = estimate_lbad_prob(csp, params, 8, 300, 5, Rational(1, 16), 4, Rational(21, 20), 1);
  auto many = estimate_lbad_prob(csp, params, 8, 300, 5, Rational(1, 16), 4, Rational(21, 20), 4);
  CHECK(one.pass);
  CHECK(one.bad == many.bad);
  CHECK_THROWS_AS(estimate_lbad_prob(csp, params, 8, 10, 5, Rational(1, 32), 4, Rational(21, 20)), Error);
}
