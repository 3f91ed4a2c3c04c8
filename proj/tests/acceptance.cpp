#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli_runner.hpp"
#include "lll/derand.hpp"
#include "lll/error.hpp"
#include "lll/io.hpp"
#include "lll/local_goodness.hpp"
#include "lll/witness.hpp"
#include "oracles.hpp"

using namespace lll;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

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

Csp sinkless_ring() {
  const std::size_t offsets[] = {1, 2};
  return sinkless_orientation_csp(circulant_graph(10, offsets));
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// At most three constraints, two labels, domains of size at most two.
std::vector<std::pair<std::string, Csp>> tiny_family() {
  const Rational third(1, 3), two_thirds(2, 3), quarter(1, 4), three_quarters(3, 4);
  std::vector<std::pair<std::string, Csp>> family;
  family.emplace_back("single", Csp::uniform(1, 2, {make_constraint(0, {0}, {{0}}, 2)}));
  family.emplace_back("disjoint", Csp::uniform(2, 2, {make_constraint(0, {0}, {{0}}, 2), make_constraint(1, {1}, {{1}}, 2)}));
  family.emplace_back("path", proper_coloring_csp(path(3), 2));
  family.emplace_back("triangle", Csp(3, {third, two_thirds},
                                      {make_constraint(0, {0, 1}, {{0, 0}, {1, 1}}, 2), make_constraint(1, {1, 2}, {{0, 1}}, 2),
                                       make_constraint(2, {0, 2}, {{1, 0}, {1, 1}}, 2)}));
  family.emplace_back("shared", Csp::uniform(2, 2, {make_constraint(0, {0}, {{1}}, 2), make_constraint(1, {0, 1}, {{0, 0}, {1, 0}}, 2),
                                                    make_constraint(2, {1}, {{0}}, 2)}));
  family.emplace_back("star", Csp(3, {quarter, three_quarters},
                                  {make_constraint(0, {0, 1}, {{1, 1}}, 2), make_constraint(1, {0, 2}, {{0, 1}, {1, 0}}, 2),
                                   make_constraint(2, {0}, {{1}}, 2)}));
  family.emplace_back("twins", Csp::uniform(3, 2, {make_constraint(0, {0, 1}, {{0, 1}}, 2), make_constraint(1, {0, 1}, {{0, 1}, {1, 1}}, 2),
                                                   make_constraint(2, {2}, {{0}}, 2)}));
  return family;
}

std::size_t family_depth(const WitnessDigraph& g, const Csp& csp) { return std::max<std::size_t>(3, oracle::required_depth(g, csp)); }

std::vector<Table> all_tables(std::size_t n, std::size_t depth) {
  std::vector<Table> out;
  const std::size_t cells = n * depth;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << cells); ++code) {
    std::vector<LabelId> entries(cells);
    for (std::size_t i = 0; i < cells; ++i) entries[i] = code >> i & 1;
    out.emplace_back(n, depth, entries);
  }
  return out;
}

Verdict criterion_1() {
  std::size_t graphs = 0, mismatches = 0, deeper = 0;
  for (const auto& [name, csp] : tiny_family()) {
    for (const auto& g : oracle::all_witness_digraphs(csp, 4)) {
      ++graphs;
      const std::size_t depth = family_depth(g, csp);
      deeper += depth > 3;
      Rational product = 1;
      for (ConstraintId c : g.decorations()) product *= oracle::prob_bad(csp, c);
      auto report = verify_mt1(g, csp, mt1::Exact{depth});
      const Rational brute = oracle::compatibility_probability(g, csp, depth);
      if (!report.pass || report.rhs != product || report.lhs != product || brute != product) ++mismatches;
    }
  }
  std::ostringstream out;
  out << graphs << " witness digraphs over " << tiny_family().size() << " CSPs, " << mismatches << " mismatches (" << deeper
      << " evaluated at depth 4 because they read row 3)";
  return {mismatches == 0 && graphs > 0, out.str()};
}

Verdict criterion_2() {
  std::size_t checks = 0, mismatches = 0, compatible = 0;
  for (const auto& [name, csp] : tiny_family()) {
    std::vector<Table> shallow = all_tables(csp.num_variables(), 3);
    std::vector<Table> deep = all_tables(csp.num_variables(), 4);
    for (const auto& g : oracle::all_witness_digraphs(csp, 4)) {
      const auto steps = oracle::realizing_steps(g, csp);
      const auto& tables = family_depth(g, csp) > 3 ? deep : shallow;
      for (const auto& table : tables) {
        const bool mine = compatibility_check(g, csp, table);
        const auto theirs = oracle::compatible(g, steps, csp, table);
        ++checks;
        compatible += mine;
        if (!theirs || mine != *theirs) ++mismatches;
      }
    }
  }
  std::ostringstream out;
  out << checks << " (digraph, table) pairs, " << compatible << " compatible, " << mismatches << " mismatches";
  return {mismatches == 0 && checks > 0, out.str()};
}

Verdict criterion_3() {
  bool ok = true;
  std::ostringstream out;
  Csp single = Csp::uniform(1, 2, {make_constraint(0, {0}, {{0}}, 2)});
  Rational geometric = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    geometric += Rational(1, 1UL << k);
    auto report = verify_mt2_partial_sums(0, single, {Rational(1, 2)}, {Rational(1, 2)}, k);
    ok = ok && report.partial_sum == geometric && report.partial_sum <= 1 && report.bound == 1 && report.pass;
  }
  out << "isolated sum " << to_string(geometric) << " <= 1";
  Csp path3 = proper_coloring_csp(path(4), 2);
  const Rational beta(1, 4);
  std::vector<Rational> betas(3, beta);
  std::vector<Rational> alphas{beta * Rational(3, 4), beta * Rational(9, 16), beta * Rational(3, 4)};
  std::size_t prefixes = 0;
  for (ConstraintId c = 0; c < 3; ++c) {
    for (std::size_t k = 1; k <= 6; ++k) {
      auto report = verify_mt2_partial_sums(c, path3, alphas, betas, k);
      ok = ok && report.pass && report.partial_sum <= Rational(1, 3);
      ++prefixes;
      if (k <= 4) ok = ok && report.representatives == oracle::sink_star(path3, c, k).size();
    }
  }
  out << "; path of 3 with beta = 1/4: " << prefixes << " prefixes checked";
  return {ok, out.str()};
}

Verdict criterion_4() {
  std::mt19937_64 rng(4);
  std::vector<Csp> instances;
  for (const auto& [name, csp] : tiny_family()) instances.push_back(csp);
  for (int i = 0; i < 5; ++i) instances.push_back(oracle::random_csp(rng, 3, 3, 2, 0.5));
  std::size_t scripts = 0, producible = 0, mismatches = 0;
  for (const auto& csp : instances) {
    const auto sequences = oracle::all_sequences(csp, 3);
    for (int t = 0; t < 8; ++t) {
      Table table = oracle::random_table(rng, csp.num_variables(), 4, 2);
      for (const auto& seq : sequences) {
        if (seq.steps.empty()) continue;
        bool produced = false;
        try {
          produced = mta_run(csp, table, strategy::Scripted{seq}).realized == seq;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::script_inconsistent) throw;
        }
        const bool consistent = check_consistency(csp, table, seq);
        ++scripts;
        producible += produced;
        if (produced != consistent || consistent != oracle::simulate_consistent(csp, table, seq).value()) ++mismatches;
      }
    }
  }
  std::ostringstream out;
  out << scripts << " scripts, " << producible << " producible, " << mismatches << " mismatches";
  return {mismatches == 0 && producible > 0 && producible < scripts, out.str()};
}

Verdict criterion_5() {
  std::mt19937_64 rng(5);
  std::size_t instances = 0, good_tables = 0, violations = 0, any_subset_violations = 0, attempts = 0;
  while (instances < 24 && attempts < 4000) {
    ++attempts;
    Csp csp = oracle::random_csp(rng, 5, 4, 2, 0.25);
    const auto stats = csp_stats(csp);
    const std::size_t gamma1 = growth_profile(dependency_graph(csp), 1).gamma_at(1);
    const Rational eps(1, static_cast<unsigned long>(gamma1 + 1));
    const Rational one_minus = 1 - eps;
    if (Rational(static_cast<unsigned long>(gamma1)) * one_minus >= 1) continue;
    const std::size_t N = 2;
    const std::size_t depth = stats.vdeg * N + 1;
    bool counted = false;
    for (int t = 0; t < 10; ++t) {
      Table table = oracle::random_table(rng, 5, depth, 2);
      bool good = true;
      for (ConstraintId c = 0; c < csp.num_constraints() && good; ++c) {
        good = is_locally_good(csp, table, LocalParams{c, 1, N, eps, 0}).locally_good;
      }
      if (!good) continue;
      ++good_tables;
      if (!counted) {
        counted = true;
        ++instances;
      }
      violations += oracle::some_execution_exhausts(csp, table, true);
      any_subset_violations += oracle::some_execution_exhausts(csp, table, false);
      if (mta_run(csp, table, strategy::MaximalGreedy{}).status != RunStatus::completed) ++violations;
    }
  }
  std::ostringstream out;
  out << instances << " instances, " << good_tables << " locally good tables, " << violations
      << " maximal executions exhausting the depth (" << any_subset_violations << " when any independent subset may be resampled)";
  return {instances >= 20 && violations == 0, out.str()};
}

Verdict criterion_6() {
  std::mt19937_64 rng(6);
  std::vector<std::pair<std::string, Csp>> graphs{{"sinkless C10(1,2)", sinkless_ring()},
                                                  {"3-coloring P6", proper_coloring_csp(path(6), 3)},
                                                  {"3-coloring C7", proper_coloring_csp(cycle(7), 3)},
                                                  {"sinkless C8", sinkless_orientation_csp(cycle(8))},
                                                  {"paired 6-uniform", hypergraph_2coloring_csp(oracle::random_paired_hypergraph(rng, 4, 6))}};
  std::size_t checks = 0, violations = 0, reach_violations = 0;
  std::string first;
  for (const auto& [name, csp] : graphs) {
    for (std::size_t R = 1; R <= 3; ++R) {
      auto report = lg_degree_check(csp, R);
      ++checks;
      if (!report.pass) {
        ++violations;
        if (first.empty()) {
          first = name + " R=" + std::to_string(R) + ": degree " + std::to_string(report.max_degree) + " > " + std::to_string(report.bound);
        }
      }
      reach_violations += !report.within_reach;
    }
  }
  std::ostringstream out;
  out << checks << " (graph, R) pairs, " << violations << " exceed gamma(2R)-1";
  if (!first.empty()) out << " (first: " << first << ")";
  out << "; " << reach_violations << " exceed gamma(2R+1)-1";
  return {violations == 0, out.str()};
}

Verdict criterion_7() {
  Csp csp = sinkless_ring();
  auto advice = parameter_advisor(Rational(1, 16), 4, Rational(21, 20), growth_profile(dependency_graph(csp), 64));
  const Rational eps = advice.params.eps, eta = advice.params.eta;
  bool ok = lbad_bound(4, Rational(1, 2), 1, 5, 0).lo == pow(Rational(5, 4), 5) * 2 &&
            lbad_bound(4, Rational(1, 2), 1, 5, 0).hi == Rational(3125, 512);
  std::ostringstream out;
  out << "eps = " << to_string(eps) << ", eta = " << to_string(eta) << ";";
  for (std::size_t N = 1; N <= 3; ++N) {
    auto est = estimate_lbad_prob(csp, LocalParams{0, 1, N, eps, eta}, 8, 10000, 7, Rational(1, 16), 4, Rational(21, 20), jobs());
    ok = ok && est.pass && est.unknown == 0;
    out << " N=" << N << ": freq " << est.frequency << " vs bound " << to_double(est.bound.hi) << ";";
  }
  out << " exact bound (d=4, eta=1/2, R=1, gamma=5, N=0) = 3125/512";
  return {ok, out.str()};
}

Verdict criterion_8() {
  std::mt19937_64 rng(8);
  std::size_t solved = 0, sound = 0, steps = 0;
  for (int i = 0; i < 30; ++i) {
    Csp csp = hypergraph_2coloring_csp(oracle::random_paired_hypergraph(rng, 2 + i % 5, 6));
    auto result = solve_double_exp(csp);
    bool solution = result.labeling.is_total() && result.d == 1 && result.p * 4 == Rational(1, 8);
    for (ConstraintId c = 0; c < csp.num_constraints() && solution; ++c) {
      std::vector<LabelId> tuple;
      for (VariableId v : csp.constraint(c).domain) tuple.push_back(result.labeling.at(v));
      solution = !oracle::tuple_is_bad(csp, c, tuple);
    }
    solved += solution;
    bool bounded = ledger_is_sound(result, csp);
    std::vector<Rational> previous = result.initial_masses;
    for (const auto& step : result.ledger) {
      ++steps;
      for (ConstraintId a = 0; a < csp.num_constraints(); ++a) {
        const Rational budget = result.initial_masses[a] * pow(Rational(2), step.touch_counts[a]);
        bounded = bounded && step.masses[a] <= budget && step.masses[a] <= previous[a] * 2;
      }
      previous = step.masses;
    }
    sound += bounded;
  }
  std::ostringstream out;
  out << solved << "/30 solutions, " << sound << "/30 ledgers within (d+1)^k over " << steps << " steps";
  return {solved == 30 && sound == 30, out.str()};
}

Verdict criterion_9() {
  Csp csp = sinkless_ring();
  const bool lll = lll_condition(Rational(1, 16), 4, LllVariant::classic).holds;
  auto report = mt_monte_carlo(csp, 1000, 64, 0x5eed, strategy::MaximalGreedy{}, jobs());
  std::ostringstream out;
  out << "success rate " << report.success_rate() << " over 1000 trials at depth 64, " << report.solutions << " verified solutions";
  return {lll && report.success_rate() >= 0.99 && report.solutions == report.completed, out.str()};
}

template <class T, class Parse>
bool json_fixed_point(const T& value, Parse parse) {
  const std::string first = io::to_json(value).dump();
  return io::to_json(parse(io::Json::parse(first))).dump() == first;
}

Verdict criterion_10() {
  const auto dir = cli::scratch("acceptance");
  std::string failures;
  std::size_t commands = 0;
  const std::string ring = cli::write(dir, "ring.json", cli::run("generate --kind sinkless --n 10 --offsets 1,2").out);
  std::mt19937_64 rng(10);
  const std::string hyper =
      cli::write(dir, "hyper.json", io::to_json(hypergraph_2coloring_csp(oracle::random_paired_hypergraph(rng, 3, 6))).dump());
  const std::string tiny = cli::write(dir, "tiny.json", io::to_json(Csp::uniform(3, 2, {make_constraint(0, {0}, {{0}}, 2),
                                                                                         make_constraint(1, {1}, {{1}}, 2)}))
                                                           .dump());
  const std::string params = cli::write(dir, "params.json", R"({"eps": "1/2", "R": 1, "N": 1, "depth": 2})");
  const std::string witness = cli::write(dir, "witness.json", R"({"vertices": [{"id": 0, "constraint": 0}, {"id": 1, "constraint": 1}], "edges": [[0, 1]]})");
  const std::string table = (dir / "table.json").string();
  cli::run("mta --problem " + ring + " --depth 6 --seed 3 --save-table " + table);
  const std::vector<std::string> runs{
      "stats --problem " + ring + " --s 21/20",
      "growth --problem " + ring,
      "mta --problem " + ring + " --depth 64 --trials 300 --seed 11",
      "mta --problem " + ring + " --depth 16 --strategy random --trace --seed 5",
      "witness --problem " + ring + " --enumerate 0 --max-vertices 3",
      "witness --problem " + ring + " --witness " + witness + " --table " + table,
      "verify-mt1 --problem " + ring + " --witness " + witness + " --exact",
      "verify-mt1 --problem " + ring + " --witness " + witness + " --trials 500 --seed 2",
      "verify-mt2 --problem " + ring + " --c 0 --beta 1/8 --alpha 1/64 --max-vertices 3",
      "locally-good --problem " + ring + " --table " + table + " --eps 1/24 --R 1 --N 2",
      "lbad --problem " + ring + " --eps 1/24 --eta 1/128 --p 1/16 --d 4 --s 21/20 --R 1 --N 2 --depth 8 --trials 200",
      "solve --problem " + hyper + " --method double-exp --ledger",
      "solve --problem " + tiny + " --method edgeless",
      "advisor --problem " + ring + " --p 1/16 --d 4 --s 21/20",
      "pipeline --problem " + tiny + " --params " + params + " --mode det",
      "pipeline --problem " + tiny + " --params " + params + " --mode rand --trials 20 --seed 8"};
  for (const auto& args : runs) {
    ++commands;
    auto a = cli::run(args + " --jobs 1");
    auto b = cli::run(args + " --jobs 4");
    bool same = false;
    try {
      same = a.code == b.code && cli::stable(a.out) == cli::stable(b.out);
    } catch (const std::exception&) {
    }
    if (!same || a.code > 1) failures += " [" + args.substr(0, args.find(' ')) + " code " + std::to_string(a.code) + "]";
  }
  auto gen_a = cli::run("generate --kind sinkless --n 10 --offsets 1,2");
  auto gen_b = cli::run("generate --kind sinkless --n 10 --offsets 1,2");
  if (gen_a.out != gen_b.out) failures += " [generate]";

  bool round_trips = true;
  round_trips = round_trips && json_fixed_point(sinkless_ring(), [](const io::Json& j) { return io::csp_from_json(j); });
  round_trips = round_trips && io::csp_from_json(io::Json::parse(gen_a.out)) == sinkless_ring();
  Csp weighted(2, {Rational(1, 3), Rational(2, 3)}, {make_constraint(0, {1, 0}, {{0, 1}}, 2)});
  round_trips = round_trips && json_fixed_point(weighted, [](const io::Json& j) { return io::csp_from_json(j); });
  round_trips = round_trips && io::csp_from_json(io::Json::parse(io::to_json(weighted).dump())) == weighted;
  round_trips = round_trips && json_fixed_point(oracle::random_table(rng, 5, 4, 3), [](const io::Json& j) { return io::table_from_json(j); });
  round_trips = round_trips && json_fixed_point(MtSequence{{{0, 3}, {1}, {2, 4}}}, [](const io::Json& j) { return io::sequence_from_json(j); });
  round_trips = round_trips && json_fixed_point(WitnessDigraph({2, 0, 2}, {{0, 1}, {0, 2}}), [](const io::Json& j) { return io::witness_from_json(j); });
  const std::size_t offsets[] = {1, 2};
  round_trips = round_trips && json_fixed_point(circulant_graph(10, offsets), [](const io::Json& j) { return io::graph_from_json(j); });
  round_trips = round_trips && json_fixed_point(oracle::random_paired_hypergraph(rng, 2, 6), [](const io::Json& j) { return io::hypergraph_from_json(j); });
  PipelineParams p;
  p.p = Rational(1, 16);
  p.d = 4;
  p.s = Rational(21, 20);
  p.eps = Rational(1, 24);
  p.eta = Rational(1, 128);
  p.R = 55;
  p.N = 3762;
  p.depth = 18811;
  round_trips = round_trips && json_fixed_point(p, [](const io::Json& j) { return io::params_from_json(j); });
  std::filesystem::remove_all(dir);

  std::ostringstream out;
  out << commands << " commands reproduced under --jobs 1 and 4";
  if (!failures.empty()) out << ", failures:" << failures;
  out << "; JSON round trips " << (round_trips ? "exact" : "NOT exact");
  return {failures.empty() && round_trips, out.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"MT1 exact equality on the tiny family", criterion_1},
      {"compatibility criterion equals the existential definition", criterion_2},
      {"MT2 partial sums", criterion_3},
      {"scripted producibility equals consistency", criterion_4},
      {"locally good tables make every maximal execution terminate", criterion_5},
      {"LG dependency degree at most gamma(2R)-1", criterion_6},
      {"LBad frequency within bound + 4 sigma", criterion_7},
      {"deterministic solver on paired 6-uniform hypergraphs", criterion_8},
      {"maximal Moser-Tardos termination on sinkless orientation", criterion_9},
      {"CLI determinism and JSON round trips", criterion_10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
