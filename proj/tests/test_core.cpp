#include <doctest.h>

#include <random>

#include "lll/csp.hpp"
#include "lll/error.hpp"
#include "lll/graph.hpp"
#include "lll/interval.hpp"
#include "oracles.hpp"

using namespace lll;

namespace {

FiniteGraph path(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return FiniteGraph(n, edges);
}

ErrorKind kind_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lll::Error");
  return ErrorKind::internal_invariant;
}

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(to_string(Rational(10, 4)) == "5/2");
  CHECK(to_string(Rational(4, 2)) == "2");
  CHECK(kind_of([] { parse_rational("1/0"); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { parse_rational("x"); }) == ErrorKind::invalid_input);
  CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
}

TEST_CASE("e enclosure and certified comparisons") {
  for (unsigned terms : {4u, 10u, 30u}) {
    Interval e = e_interval(terms);
    CHECK(e.lo < Rational(271829, 100000));
    CHECK(e.hi > Rational(271828, 100000));
  }
  CHECK(certified_less([](const Interval& e) { return e; }, Rational(272, 100)));
  CHECK_FALSE(certified_less([](const Interval& e) { return e; }, Rational(271, 100)));
  CHECK(certified_less_equal([](const Interval& e) { return e * Interval::exact(Rational(1, 3)); }, 1));
}

TEST_CASE("assignment codes are lexicographic") {
  auto tuples = oracle::all_tuples(3, 3);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    CHECK(encode_assignment(tuples[i], 3) == i);
    CHECK(decode_assignment(i, 3, 3) == tuples[i]);
  }
  CHECK(assignment_space(2, 10, 1024) == 1024u);
  CHECK_FALSE(assignment_space(2, 11, 1024).has_value());
  CHECK_FALSE(assignment_space(3, 64).has_value());
}

TEST_CASE("make_constraint sorts the domain and permutes tuples") {
  Constraint c = make_constraint(0, {5, 2}, {{1, 0}, {1, 0}}, 2);
  CHECK(c.domain == std::vector<VariableId>{2, 5});
  CHECK(c.bad == std::vector<AssignmentCode>{1});
  CHECK(kind_of([] { make_constraint(0, {1, 1}, {}, 2); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { make_constraint(0, {1}, {{2}}, 2); }) == ErrorKind::invalid_input);
}

TEST_CASE("csp validation") {
  CHECK(kind_of([] { Csp(1, {Rational(1, 2), Rational(1, 3)}, {}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { Csp::uniform(1, 2, {make_constraint(0, {3}, {}, 2)}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { Csp::uniform(1, 2, {make_constraint(1, {0}, {}, 2)}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { Csp::uniform(12, 2, {make_constraint(0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {}, 2)}, 1024); }) ==
        ErrorKind::cap_exceeded);
}

TEST_CASE("prob_bad matches brute force on random instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Csp csp = oracle::random_csp(rng, 4, 3, 3, 0.4);
    for (ConstraintId c = 0; c < csp.num_constraints(); ++c) CHECK(prob_bad(csp, c) == oracle::prob_bad(csp, c));
  }
  Csp weighted(2, {Rational(1, 3), Rational(2, 3)}, {make_constraint(0, {0, 1}, {{0, 1}, {1, 1}}, 2)});
  CHECK(prob_bad(weighted, 0) == Rational(2, 3));
  CHECK(oracle::prob_bad(weighted, 0) == Rational(2, 3));
}

TEST_CASE("dependency graph matches domain intersection") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Csp csp = oracle::random_csp(rng, 6, 5, 3, 0.3);
    FiniteGraph dep = dependency_graph(csp);
    for (ConstraintId a = 0; a < 5; ++a) {
      for (ConstraintId b = 0; b < 5; ++b) {
        if (a != b) CHECK(dep.has_edge(a, b) == oracle::related(csp, a, b));
      }
    }
  }
}

TEST_CASE("violates, conditional mass and quotients") {
  Csp csp = proper_coloring_csp(path(3), 2);
  PartialLabeling f(3);
  CHECK(kind_of([&] { violates(csp, 0, f); }) == ErrorKind::missing_variable);
  f.set(0, 1);
  CHECK(conditional_prob_bad(csp, 0, f) == Rational(1, 2));
  CHECK(conditional_prob_bad(csp, 1, f) == Rational(1, 2));
  auto q = quotient_csp(csp, f);
  CHECK(q.reduced.constraint(0).domain == std::vector<VariableId>{1});
  CHECK(q.reduced.constraint(0).bad == std::vector<AssignmentCode>{1});
  CHECK(prob_bad(q.reduced, 0) == conditional_prob_bad(csp, 0, f));
  f.set(1, 0);
  f.set(2, 1);
  CHECK(is_solution(csp, f));
  f.set(2, 0);
  CHECK_FALSE(is_solution(csp, f));
  CHECK(violates(csp, 1, f));
}

TEST_CASE("stats and LLL conditions") {
  const std::size_t offsets[] = {1, 2};
  Csp sinkless = sinkless_orientation_csp(circulant_graph(10, offsets));
  auto stats = csp_stats(sinkless);
  CHECK(stats.order == 4);
  CHECK(stats.vdeg == 2);
  CHECK(stats.max_dep_degree == 4);
  CHECK(stats.p_max == Rational(1, 16));
  CHECK(lll_condition(stats.p_max, 4, LllVariant::classic).holds);
  CHECK(lll_condition(stats.p_max, 4, LllVariant::exponent, Rational(21, 20)).holds);
  CHECK_FALSE(lll_condition(stats.p_max, 4, LllVariant::double_exp).holds);
  CHECK(lll_condition(Rational(1, 32), 1, LllVariant::double_exp).lhs_lower == Rational(1, 8));
  CHECK_FALSE(lll_condition(Rational(1, 10), 3, LllVariant::classic).holds);
  CHECK(kind_of([] { lll_condition(Rational(1, 2), 1, LllVariant::exponent, 1); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("sinkless orientation forbids exactly the sink") {
  Csp csp = sinkless_orientation_csp(path(3));
  CHECK(csp.num_variables() == 2);
  CHECK(prob_bad(csp, 1) == Rational(1, 4));
  // edge 0 = (0,1), edge 1 = (1,2); vertex 1 is a sink when 0->1 and 2->1
  CHECK(violates(csp, 1, PartialLabeling::total({0, 1})));
  CHECK_FALSE(violates(csp, 1, PartialLabeling::total({0, 0})));
  CHECK(kind_of([] { sinkless_orientation_csp(FiniteGraph(2, std::vector<Edge>{})); }) == ErrorKind::invalid_input);
}

TEST_CASE("graph balls, growth and coloring") {
  const std::size_t offsets[] = {1, 2};
  FiniteGraph g = circulant_graph(10, offsets);
  CHECK(g.max_degree() == 4);
  CHECK(ball(g, 0, 1) == std::vector<Vertex>{0, 1, 2, 8, 9});
  auto profile = growth_profile(g, 4);
  CHECK(profile.gamma == std::vector<std::size_t>{5, 9, 10, 10});
  CHECK(profile.gamma_at(0) == 1);
  CHECK(profile.gamma_at(50) == 10);
  CHECK(profile.proxy_gamma == 10);
  CHECK(profile.proxy_radius == 4);
  auto colors = greedy_proper_coloring(g);
  for (auto [u, v] : g.edges()) CHECK(colors[u] != colors[v]);
  auto p2 = power_graph(path(5), 2);
  CHECK(p2.has_edge(0, 2));
  CHECK_FALSE(p2.has_edge(0, 3));
  std::vector<Vertex> all{0, 1, 2, 3, 4};
  CHECK(maximal_independent_set(path(5), all) == std::vector<Vertex>{0, 2, 4});
  CHECK(kind_of([] { FiniteGraph(2, std::vector<Edge>{{0, 0}}); }) == ErrorKind::invalid_input);
}
