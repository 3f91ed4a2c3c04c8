#include <doctest.h>

#include <random>

#include "lll/error.hpp"
#include "lll/moser_tardos.hpp"
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

MtSequence random_sequence(std::mt19937_64& rng, const Csp& csp, std::size_t steps) {
  auto all = oracle::all_sequences(csp, 1);
  std::uniform_int_distribution<std::size_t> pick(1, all.size() - 1);
  MtSequence seq;
  for (std::size_t i = 0; i < steps; ++i) seq.steps.push_back(all[pick(rng)].steps.front());
  return seq;
}

}  // namespace

TEST_CASE("table access and truncation") {
  Table t = Table::from_rows({{0, 1}, {1, 1}});
  CHECK(t.depth() == 2);
  CHECK(t.at(1, 0) == 1);
  CHECK(kind_of([&] { t.at(0, 2); }) == ErrorKind::depth_exceeded);
  CHECK(Table::constant_rows(std::vector<LabelId>{1, 0}, 3).at(0, 2) == 1);
  CHECK(t.rows() == std::vector<std::vector<LabelId>>{{0, 1}, {1, 1}});
}

TEST_CASE("counter hash and sampling are pure functions") {
  CHECK(counter_hash(1, 2, 3, 4) == counter_hash(1, 2, 3, 4));
  CHECK(counter_hash(1, 2, 3, 4) != counter_hash(1, 2, 4, 3));
  Csp csp = proper_coloring_csp(path(4), 3);
  CHECK(sample_table(csp, 5, 9, 2) == sample_table(csp, 5, 9, 2));
  CHECK_FALSE(sample_table(csp, 5, 9, 2) == sample_table(csp, 5, 9, 3));
}

TEST_CASE("label sampler follows the weights") {
  LabelSampler sampler({Rational(1, 4), Rational(3, 4)});
  CHECK(sampler(0) == 0);
  CHECK(sampler(~std::uint64_t{0}) == 1);
  CHECK(sampler(std::uint64_t{1} << 62) == 1);
  CHECK(sampler((std::uint64_t{1} << 62) - 1) == 0);
  std::size_t zeros = 0;
  for (std::uint64_t i = 0; i < 40000; ++i) zeros += sampler(counter_hash(5, 0, i, 0)) == 0;
  CHECK(zeros > 9400);
  CHECK(zeros < 10600);
}

TEST_CASE("require_independent_steps") {
  Csp csp = proper_coloring_csp(path(3), 2);
  FiniteGraph dep = dependency_graph(csp);
  CHECK_NOTHROW(require_independent_steps(MtSequence{{{0}, {1}}}, dep));
  CHECK(kind_of([&] { require_independent_steps(MtSequence{{{0, 1}}}, dep); }) == ErrorKind::non_independent);
  CHECK(kind_of([&] { require_independent_steps(MtSequence{{{0, 0}}}, dep); }) == ErrorKind::non_independent);
  CHECK(kind_of([&] { require_independent_steps(MtSequence{{{7}}}, dep); }) == ErrorKind::invalid_input);
}

TEST_CASE("runs produce consistent sequences and solutions") {
  std::mt19937_64 rng(3);
  const Strategy strategies[] = {strategy::MaximalGreedy{}, strategy::FirstSingleton{}, strategy::RandomSubset{17}};
  for (int trial = 0; trial < 200; ++trial) {
    Csp csp = oracle::random_csp(rng, 5, 4, 3, 0.25);
    Table table = oracle::random_table(rng, 5, 6, 2);
    for (const auto& s : strategies) {
      RunTrace trace = mta_run(csp, table, s);
      CHECK(check_consistency(csp, table, trace.realized));
      CHECK(oracle::simulate_consistent(csp, table, trace.realized) == true);
      CHECK(trace.iterations.size() == trace.iterations_run);
      CHECK(trace.realized.total_size() == trace.resamples);
      for (const auto& record : trace.iterations) {
        for (ConstraintId c : record.chosen) CHECK(std::binary_search(record.violated.begin(), record.violated.end(), c));
      }
      if (trace.status == RunStatus::completed) CHECK(is_solution(csp, trace.result));
      if (trace.status == RunStatus::depth_exhausted) CHECK_FALSE(trace.result.is_total());
      if (std::holds_alternative<strategy::MaximalGreedy>(s)) {
        for (const auto& record : trace.iterations) {
          for (ConstraintId c : record.violated) {
            bool covered = false;
            for (ConstraintId a : record.chosen) covered = covered || oracle::related(csp, a, c);
            CHECK(covered);
          }
        }
      }
    }
  }
}

TEST_CASE("scripted runs") {
  Csp csp = proper_coloring_csp(path(3), 2);
  Table table = Table::from_rows({{0, 0, 0}, {1, 0, 1}, {0, 0, 0}});
  RunTrace trace = mta_run(csp, table, strategy::Scripted{MtSequence{{{0}, {1}}}});
  CHECK(trace.status == RunStatus::completed);
  CHECK(trace.realized == MtSequence{{{0}, {1}}});
  CHECK(trace.result.labels() == std::vector<LabelId>{1, 0, 1});
  CHECK(kind_of([&] { mta_run(csp, table, strategy::Scripted{MtSequence{{{0}, {0}}}}); }) == ErrorKind::script_inconsistent);
  CHECK(kind_of([&] { mta_run(csp, table, strategy::Scripted{MtSequence{{{0, 1}}}}); }) == ErrorKind::non_independent);
  CHECK(mta_run(csp, table, strategy::Scripted{MtSequence{{{0}}}}).status == RunStatus::script_exhausted);
  CHECK(mta_run(csp, Table::constant_rows(std::vector<LabelId>{0, 0, 0}, 2), strategy::MaximalGreedy{}).status ==
        RunStatus::depth_exhausted);
  CHECK(mta_run(csp, Table::constant_rows(std::vector<LabelId>{0, 0, 0}, 9), strategy::FirstSingleton{}, {2, true}).status ==
        RunStatus::iteration_cap);
}

TEST_CASE("consistency agrees with step-by-step replay") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    Csp csp = oracle::random_csp(rng, 4, 3, 2, 0.5);
    Table table = oracle::random_table(rng, 4, 8, 2);
    MtSequence seq = random_sequence(rng, csp, 3);
    CHECK(check_consistency(csp, table, seq) == oracle::simulate_consistent(csp, table, seq).value());
    std::vector<bool> mask{trial % 2 == 0, true, trial % 3 == 0};
    CHECK(check_consistency_masked(csp, table, seq, mask) == oracle::simulate_consistent(csp, table, seq, mask).value());
  }
  Csp csp = proper_coloring_csp(path(2), 2);
  CHECK(kind_of([&] { check_consistency(csp, Table::constant_rows(std::vector<LabelId>{0, 0}, 1), MtSequence{{{0}, {0}}}); }) ==
        ErrorKind::depth_exceeded);
}

TEST_CASE("monte carlo does not depend on the job count") {
  const std::size_t offsets[] = {1, 2};
  Csp csp = sinkless_orientation_csp(circulant_graph(10, offsets));
  for (const Strategy& s : {Strategy{strategy::MaximalGreedy{}}, Strategy{strategy::RandomSubset{3}}}) {
    auto one = mt_monte_carlo(csp, 200, 16, 42, s, 1);
    auto four = mt_monte_carlo(csp, 200, 16, 42, s, 4);
    CHECK(one.completed == four.completed);
    CHECK(one.status_counts == four.status_counts);
    CHECK(one.resample_histogram == four.resample_histogram);
    CHECK(one.solutions == one.completed);
  }
}

TEST_CASE("parallel_for propagates failures") {
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 4) throw Error(ErrorKind::internal_invariant, "boom");
                  }),
                  Error);
}
