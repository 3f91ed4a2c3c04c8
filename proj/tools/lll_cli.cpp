#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lll/csp.hpp"
#include "lll/derand.hpp"
#include "lll/error.hpp"
#include "lll/graph.hpp"
#include "lll/io.hpp"
#include "lll/local_goodness.hpp"
#include "lll/moser_tardos.hpp"
#include "lll/witness.hpp"

namespace {

using lll::Error;
using lll::ErrorKind;
using lll::Rational;
using lll::io::Json;

constexpr std::uint64_t kDefaultSeed = 0x5eedULL;

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kExhausted = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::cap_exceeded:
    case ErrorKind::budget_exceeded:
    case ErrorKind::depth_exceeded:
    case ErrorKind::infeasible:
      return kExhausted;
    case ErrorKind::invalid_input:
    case ErrorKind::invalid_parameter:
    case ErrorKind::missing_variable:
    case ErrorKind::non_independent:
    case ErrorKind::script_inconsistent:
      return kUsage;
    case ErrorKind::hypothesis_violated:
    case ErrorKind::precondition_violated:
    case ErrorKind::unsatisfiable:
    case ErrorKind::internal_invariant:
      return kFail;
  }
  return kFail;
}

std::uint64_t env_cap(const char* name, std::uint64_t fallback) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return fallback;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(value, &end, 10);
  if (*end != '\0' || parsed == 0) throw Error(ErrorKind::invalid_parameter, std::string(name) + " must be a positive integer");
  return parsed;
}

struct Global {
  std::uint64_t seed = kDefaultSeed;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> materialization_cap;
  std::optional<std::uint64_t> node_cap;
  std::optional<std::uint64_t> enum_cap;
  bool compact = false;

  std::uint64_t mat() const { return materialization_cap.value_or(env_cap("LLL_MATERIALIZATION_CAP", lll::kDefaultMaterializationCap)); }
  std::uint64_t nodes() const { return node_cap.value_or(env_cap("LLL_SEARCH_NODE_CAP", lll::kDefaultSearchNodeCap)); }
  std::uint64_t enumeration() const { return enum_cap.value_or(env_cap("LLL_ENUM_CAP", lll::kDefaultEnumerationCap)); }
};

struct Outcome {
  Json results;
  int code = kPass;
};

/// Collects input digests, echoed parameters and cap events for the report.
class Session {
 public:
  explicit Session(const Global& global) : global_(global) {}

  std::string read(const std::string& path) {
    std::string text = lll::io::read_file(path);
    inputs_ += lll::io::digest(text);
    return text;
  }

  lll::Csp problem(const std::string& path) { return lll::io::csp_from_json(lll::io::parse_json(read(path)), global_.mat()); }
  lll::Table table(const std::string& path) { return lll::io::table_from_json(lll::io::parse_json(read(path))); }
  lll::MtSequence sequence(const std::string& path) { return lll::io::sequence_from_json(lll::io::parse_json(read(path))); }
  lll::WitnessDigraph witness(const std::string& path) { return lll::io::witness_from_json(lll::io::parse_json(read(path))); }
  lll::PipelineParams params(const std::string& path) { return lll::io::params_from_json(lll::io::parse_json(read(path))); }

  lll::FiniteGraph graph(const std::string& path) {
    std::string text = read(path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return lll::io::graph_from_json(lll::io::parse_json(text));
    return lll::io::graph_from_text(text);
  }

  lll::Hypergraph hypergraph(const std::string& path) { return lll::io::hypergraph_from_json(lll::io::parse_json(read(path))); }

  void event(const std::string& text) { events_.push_back(text); }
  std::string digest() const { return lll::io::digest(inputs_); }
  const Json& events() const { return events_; }
  const Global& global() const { return global_; }

 private:
  const Global& global_;
  std::string inputs_;
  Json events_ = Json::array();
};

Rational rational(const std::string& text) { return lll::parse_rational(text); }

std::vector<Rational> rational_list(const std::string& text, std::size_t count) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(rational(item));
  if (out.size() == 1) out.assign(count, out.front());
  if (out.size() != count) throw Error(ErrorKind::invalid_parameter, "expected one value or one per constraint");
  return out;
}

Json lll_report(const lll::LllReport& report) {
  return Json{{"holds", report.holds},
              {"inequality", report.inequality},
              {"lhs_lower", lll::to_double(report.lhs_lower)},
              {"lhs_upper", lll::to_double(report.lhs_upper)}};
}

Json witness_sequence(const lll::MtSequence& seq) { return lll::io::to_json(seq)["steps"]; }

lll::Strategy parse_strategy(const std::string& name, std::uint64_t seed) {
  if (name == "mmta") return lll::strategy::MaximalGreedy{};
  if (name == "first") return lll::strategy::FirstSingleton{};
  if (name == "random") return lll::strategy::RandomSubset{seed};
  throw Error(ErrorKind::invalid_parameter, "unknown strategy '" + name + "'");
}

// ---- subcommands -----------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::string graph;
  std::string hypergraph;
  std::size_t k = 3;
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
};

Json run_generate(Session& s, const GenerateArgs& a) {
  auto need = [](const std::string& path, const char* flag) {
    if (path.empty()) throw Error(ErrorKind::invalid_parameter, std::string("--kind requires ") + flag);
  };
  auto base = [&] {
    if (a.graph.empty() && a.n > 0) return lll::circulant_graph(a.n, a.offsets);
    need(a.graph, "--graph (or --n and --offsets)");
    return s.graph(a.graph);
  };
  if (a.kind == "coloring") return lll::io::to_json(lll::proper_coloring_csp(base(), a.k));
  if (a.kind == "sinkless") return lll::io::to_json(lll::sinkless_orientation_csp(base()));
  if (a.kind == "hypergraph") {
    need(a.hypergraph, "--hypergraph");
    return lll::io::to_json(lll::hypergraph_2coloring_csp(s.hypergraph(a.hypergraph)));
  }
  if (a.kind == "circulant") return lll::io::to_json(lll::circulant_graph(a.n, a.offsets));
  throw Error(ErrorKind::invalid_parameter, "unknown kind '" + a.kind + "'");
}

struct StatsArgs {
  std::string problem;
  std::string s;
};

Outcome run_stats(Session& s, Json& params, const StatsArgs& a) {
  params = {{"problem", a.problem}};
  auto csp = s.problem(a.problem);
  auto stats = lll::csp_stats(csp);
  Json lll_checks{{"classic", lll_report(lll::lll_condition(stats.p_max, stats.max_dep_degree, lll::LllVariant::classic))},
                  {"double_exp", lll_report(lll::lll_condition(stats.p_max, stats.max_dep_degree, lll::LllVariant::double_exp))}};
  if (!a.s.empty()) {
    params["s"] = a.s;
    lll_checks["exponent"] = lll_report(lll::lll_condition(stats.p_max, stats.max_dep_degree, lll::LllVariant::exponent, rational(a.s)));
  }
  return {Json{{"variables", csp.num_variables()},
               {"labels", csp.num_labels()},
               {"constraints", csp.num_constraints()},
               {"order", stats.order},
               {"vdeg", stats.vdeg},
               {"max_dep_degree", stats.max_dep_degree},
               {"p_max", lll::to_string(stats.p_max)},
               {"lll", lll_checks}},
          kPass};
}

struct GrowthArgs {
  std::string problem;
  std::string graph;
  std::size_t max_radius = 8;
};

lll::FiniteGraph graph_or_dependency(Session& s, const std::string& problem, const std::string& graph) {
  if (!problem.empty() && !graph.empty()) throw Error(ErrorKind::invalid_parameter, "give either --problem or --graph");
  if (!problem.empty()) return lll::dependency_graph(s.problem(problem));
  if (!graph.empty()) return s.graph(graph);
  throw Error(ErrorKind::invalid_parameter, "--problem or --graph is required");
}

Outcome run_growth(Session& s, Json& params, const GrowthArgs& a) {
  params = {{"problem", a.problem}, {"graph", a.graph}, {"max_radius", a.max_radius}};
  auto g = graph_or_dependency(s, a.problem, a.graph);
  return {lll::io::to_json(lll::growth_profile(g, a.max_radius)), kPass};
}

struct MtaArgs {
  std::string problem;
  std::string table;
  std::string script;
  std::string save_table;
  std::string strategy = "mmta";
  std::size_t depth = 64;
  std::size_t trials = 0;
  std::optional<std::size_t> max_iters;
  bool trace = false;
};

Outcome run_mta(Session& s, Json& params, const MtaArgs& a) {
  params = {{"problem", a.problem}, {"strategy", a.strategy}, {"depth", a.depth}, {"trials", a.trials}};
  auto csp = s.problem(a.problem);
  const auto seed = s.global().seed;
  if (a.trials > 0) {
    if (!a.table.empty() || !a.script.empty()) throw Error(ErrorKind::invalid_parameter, "--trials cannot be combined with --table or --script");
    auto report = lll::mt_monte_carlo(csp, a.trials, a.depth, seed, parse_strategy(a.strategy, seed), s.global().jobs);
    Json statuses = Json::object();
    for (auto [status, count] : report.status_counts) statuses[lll::to_string(status)] = count;
    Json histogram = Json::array();
    for (auto [resamples, count] : report.resample_histogram) histogram.push_back(Json::array({resamples, count}));
    return {Json{{"trials", report.trials},
                 {"completed", report.completed},
                 {"solutions", report.solutions},
                 {"success_rate", report.success_rate()},
                 {"status_counts", statuses},
                 {"resample_histogram", histogram}},
            kPass};
  }
  lll::Table table = a.table.empty() ? lll::sample_table(csp, a.depth, seed, 0) : s.table(a.table);
  params["table"] = a.table;
  lll::Strategy strategy = parse_strategy(a.strategy, seed);
  if (!a.script.empty()) {
    params["script"] = a.script;
    strategy = lll::strategy::Scripted{s.sequence(a.script)};
  }
  lll::MtaOptions options;
  options.max_iters = a.max_iters;
  options.record_iterations = a.trace;
  auto trace = lll::mta_run(csp, table, strategy, options);
  Json results = lll::io::to_json(trace, a.trace);
  results["solution"] = trace.status == lll::RunStatus::completed && lll::is_solution(csp, trace.result);
  if (!a.save_table.empty()) {
    std::ofstream out(a.save_table);
    if (!out) throw Error(ErrorKind::invalid_input, "cannot write '" + a.save_table + "'");
    out << lll::io::to_json(table).dump(2) << "\n";
    results["table_saved"] = a.save_table;
  }
  return {results, trace.status == lll::RunStatus::completed ? kPass : kFail};
}

struct ConsistencyArgs {
  std::string problem, table, sequence;
};

Outcome run_consistency(Session& s, Json& params, const ConsistencyArgs& a) {
  params = {{"problem", a.problem}, {"table", a.table}, {"sequence", a.sequence}};
  auto csp = s.problem(a.problem);
  bool consistent = lll::check_consistency(csp, s.table(a.table), s.sequence(a.sequence));
  return {Json{{"consistent", consistent}}, consistent ? kPass : kFail};
}

struct WitnessArgs {
  std::string problem, sequence, witness, table;
  std::optional<std::size_t> enumerate_c;
  std::size_t max_vertices = 4;
};

Outcome run_witness(Session& s, Json& params, const WitnessArgs& a) {
  params = {{"problem", a.problem}, {"sequence", a.sequence}, {"witness", a.witness}, {"table", a.table}};
  auto csp = s.problem(a.problem);
  if (a.enumerate_c) {
    params["enumerate"] = *a.enumerate_c;
    params["max_vertices"] = a.max_vertices;
    auto reps = lll::enumerate_sink_star(*a.enumerate_c, csp, a.max_vertices, s.global().enumeration());
    Json list = Json::array();
    for (const auto& g : reps) list.push_back(lll::io::to_json(g));
    return {Json{{"count", reps.size()}, {"representatives", list}}, kPass};
  }
  if (a.sequence.empty() == a.witness.empty()) throw Error(ErrorKind::invalid_parameter, "give exactly one of --sequence or --witness");
  lll::WitnessDigraph g = a.sequence.empty() ? s.witness(a.witness) : lll::full_witness_digraph(s.sequence(a.sequence), csp);
  const bool valid = lll::validate_witness(g, csp);
  Json results{{"digraph", lll::io::to_json(g)}, {"valid", valid}};
  if (valid) {
    results["sinks"] = g.sinks();
    results["canonical"] = lll::io::to_json(lll::canonical_representative(g));
  }
  int code = valid ? kPass : kFail;
  if (!a.table.empty() && valid) {
    bool compatible = lll::compatibility_check(g, csp, s.table(a.table));
    results["compatible"] = compatible;
    if (!compatible) code = kFail;
  }
  return {results, code};
}

struct Mt1Args {
  std::string problem, witness;
  bool exact = false;
  std::size_t trials = 0;
  std::size_t depth = 8;
};

Outcome run_verify_mt1(Session& s, Json& params, const Mt1Args& a) {
  params = {{"problem", a.problem}, {"witness", a.witness}, {"exact", a.exact}, {"trials", a.trials}, {"depth", a.depth}};
  auto csp = s.problem(a.problem);
  auto g = s.witness(a.witness);
  if (a.exact == (a.trials > 0)) throw Error(ErrorKind::invalid_parameter, "give exactly one of --exact or --trials");
  lll::Mt1Mode mode = a.exact ? lll::Mt1Mode{lll::mt1::Exact{a.depth, s.global().mat()}}
                              : lll::Mt1Mode{lll::mt1::MonteCarlo{a.trials, s.global().seed, a.depth}};
  auto report = lll::verify_mt1(g, csp, mode);
  Json results{{"lhs", lll::to_string(report.lhs)},
               {"rhs", lll::to_string(report.rhs)},
               {"relevant_cells", report.relevant_cells},
               {"pass", report.pass}};
  if (!a.exact) results["sigma"] = report.sigma;
  return {results, report.pass ? kPass : kFail};
}

struct Mt2Args {
  std::string problem;
  std::size_t c = 0;
  std::string alpha, beta;
  std::size_t max_vertices = 4;
};

Outcome run_verify_mt2(Session& s, Json& params, const Mt2Args& a) {
  params = {{"problem", a.problem}, {"c", a.c}, {"alpha", a.alpha}, {"beta", a.beta}, {"max_vertices", a.max_vertices}};
  auto csp = s.problem(a.problem);
  std::vector<Rational> alpha;
  if (a.alpha.empty()) {
    for (lll::ConstraintId c = 0; c < csp.num_constraints(); ++c) alpha.push_back(lll::prob_bad(csp, c));
  } else {
    alpha = rational_list(a.alpha, csp.num_constraints());
  }
  auto beta = rational_list(a.beta, csp.num_constraints());
  auto report = lll::verify_mt2_partial_sums(a.c, csp, alpha, beta, a.max_vertices, s.global().enumeration());
  return {Json{{"partial_sum", lll::to_string(report.partial_sum)},
               {"bound", lll::to_string(report.bound)},
               {"representatives", report.representatives},
               {"pass", report.pass}},
          report.pass ? kPass : kFail};
}

struct LocalArgs {
  std::string problem, table;
  std::optional<std::size_t> c;
  std::size_t R = 1, N = 1;
  std::string eps;
};

Outcome run_locally_good(Session& s, Json& params, const LocalArgs& a) {
  params = {{"problem", a.problem}, {"table", a.table}, {"R", a.R}, {"N", a.N}, {"eps", a.eps}};
  auto csp = s.problem(a.problem);
  auto table = s.table(a.table);
  std::vector<lll::ConstraintId> targets;
  if (a.c) {
    params["c"] = *a.c;
    targets.push_back(*a.c);
  } else {
    for (lll::ConstraintId c = 0; c < csp.num_constraints(); ++c) targets.push_back(c);
  }
  Json verdicts = Json::array();
  bool all_good = true;
  for (auto c : targets) {
    auto result = lll::is_locally_good(csp, table, lll::LocalParams{c, a.R, a.N, rational(a.eps), 0}, s.global().nodes());
    Json entry{{"c", c}, {"locally_good", result.locally_good}, {"nodes", result.nodes}};
    if (!result.locally_good) {
      entry["radius"] = *result.radius;
      entry["witness"] = witness_sequence(result.witness);
      all_good = false;
    }
    verdicts.push_back(entry);
  }
  return {Json{{"locally_good", all_good}, {"constraints", verdicts}}, all_good ? kPass : kFail};
}

struct LbadArgs {
  std::string problem;
  std::size_t c = 0, R = 1, N = 1, depth = 8, trials = 1000, d = 0;
  std::string eps, eta, p, s;
};

Outcome run_lbad(Session& s, Json& params, const LbadArgs& a) {
  params = {{"problem", a.problem}, {"c", a.c}, {"R", a.R}, {"N", a.N}, {"depth", a.depth}, {"trials", a.trials},
            {"eps", a.eps}, {"eta", a.eta}, {"p", a.p}, {"d", a.d}, {"s", a.s}};
  auto csp = s.problem(a.problem);
  auto estimate = lll::estimate_lbad_prob(csp, lll::LocalParams{a.c, a.R, a.N, rational(a.eps), rational(a.eta)}, a.depth, a.trials,
                                          s.global().seed, rational(a.p), a.d, rational(a.s), s.global().jobs, s.global().nodes());
  if (estimate.unknown > 0) s.event(std::to_string(estimate.unknown) + " trials exhausted the search node cap");
  return {Json{{"trials", estimate.trials},
               {"bad", estimate.bad},
               {"unknown", estimate.unknown},
               {"frequency", estimate.frequency},
               {"bound_lower", lll::to_string(estimate.bound.lo)},
               {"bound_upper", lll::to_string(estimate.bound.hi)},
               {"bound_approx", lll::to_double(estimate.bound.hi)},
               {"sigma", estimate.sigma},
               {"pass", estimate.pass}},
          estimate.pass ? kPass : kFail};
}

struct SolveArgs {
  std::string problem, method = "double-exp", params, mode = "det";
  std::size_t trials = 100;
  bool ledger = false;
};

Json pipeline_results(const lll::PipelineResult& result) {
  return Json{{"assignment", lll::io::to_json(result.solution)["assignment"]},
              {"attempts", result.attempts},
              {"lg_max_degree", result.lg_max_degree},
              {"lg_p_max", lll::to_string(result.lg_p_max)},
              {"iterations", result.run.iterations_run},
              {"table", lll::io::to_json(result.table)},
              {"provenance", result.provenance}};
}

Outcome run_pipeline_common(Session& s, Json& params, const SolveArgs& a, const lll::Csp& csp) {
  if (a.params.empty()) throw Error(ErrorKind::invalid_parameter, "--params is required");
  auto pp = s.params(a.params);
  params["pipeline"] = lll::io::to_json(pp);
  lll::PipelineMode mode;
  if (a.mode == "det") {
    mode = lll::pipeline_mode::Deterministic{};
  } else if (a.mode == "rand") {
    mode = lll::pipeline_mode::Randomized{s.global().seed, a.trials};
  } else {
    throw Error(ErrorKind::invalid_parameter, "--mode must be det or rand");
  }
  auto result = lll::pipeline(csp, pp, mode, lll::PipelineLimits{s.global().mat(), s.global().nodes()});
  return {pipeline_results(result), kPass};
}

Outcome run_solve(Session& s, Json& params, const SolveArgs& a) {
  params = {{"problem", a.problem}, {"method", a.method}, {"mode", a.mode}};
  auto csp = s.problem(a.problem);
  if (a.method == "pipeline") return run_pipeline_common(s, params, a, csp);
  if (a.method == "edgeless") {
    auto f = lll::solve_edgeless(csp);
    return {Json{{"assignment", lll::io::to_json(f)["assignment"]}, {"provenance", Json::array({"edgeless"})}}, kPass};
  }
  if (a.method != "double-exp") throw Error(ErrorKind::invalid_parameter, "--method must be double-exp, edgeless or pipeline");
  auto result = lll::solve_double_exp(csp);
  Json results{{"assignment", lll::io::to_json(result.labeling)["assignment"]},
               {"provenance", Json::array({"double-exp"})},
               {"d", result.d},
               {"p", lll::to_string(result.p)},
               {"classes", result.classes},
               {"ledger_sound", lll::ledger_is_sound(result, csp)}};
  if (a.ledger) {
    Json ledger = Json::array();
    for (const auto& step : result.ledger) {
      Json masses = Json::array();
      for (const auto& m : step.masses) masses.push_back(lll::to_string(m));
      ledger.push_back(Json{{"class", step.color_class}, {"masses", masses}, {"touch_counts", step.touch_counts}});
    }
    results["ledger"] = ledger;
  }
  return {results, results["ledger_sound"].get<bool>() ? kPass : kFail};
}

Outcome run_pipeline(Session& s, Json& params, const SolveArgs& a) {
  params = {{"problem", a.problem}, {"mode", a.mode}};
  auto csp = s.problem(a.problem);
  return run_pipeline_common(s, params, a, csp);
}

struct AdvisorArgs {
  std::string problem, graph, p, s, eps;
  std::optional<std::size_t> d;
  std::size_t max_radius = 64;
};

Outcome run_advisor(Session& s, Json& params, const AdvisorArgs& a) {
  params = {{"problem", a.problem}, {"graph", a.graph}, {"max_radius", a.max_radius}, {"s", a.s}};
  if (a.s.empty()) throw Error(ErrorKind::invalid_parameter, "--s is required");
  Rational p;
  std::size_t d = 0;
  lll::FiniteGraph dep;
  if (!a.problem.empty()) {
    if (!a.graph.empty()) throw Error(ErrorKind::invalid_parameter, "give either --problem or --graph");
    auto csp = s.problem(a.problem);
    auto stats = lll::csp_stats(csp);
    dep = lll::dependency_graph(csp);
    p = stats.p_max;
    d = stats.max_dep_degree;
  } else {
    dep = graph_or_dependency(s, "", a.graph);
    d = dep.max_degree();
  }
  if (!a.p.empty()) p = rational(a.p);
  if (a.d) d = *a.d;
  if (a.problem.empty() && a.p.empty()) throw Error(ErrorKind::invalid_parameter, "--p is required with --graph");
  std::optional<Rational> eps;
  if (!a.eps.empty()) {
    eps = rational(a.eps);
    params["eps"] = a.eps;
  }
  auto report = lll::parameter_advisor(p, d, rational(a.s), lll::growth_profile(dep, a.max_radius), eps, s.global().mat());
  return {Json{{"params", lll::io::to_json(report.params)},
               {"lll_exponent_holds", report.lll_exponent_holds},
               {"growth_target", lll::to_string(report.growth_target)},
               {"gamma_R", report.gamma_R},
               {"gamma_2R", report.gamma_2R},
               {"F_upper", lll::to_double(report.F.hi)},
               {"log2_N_threshold", report.log2_N_threshold},
               {"log2_materialization_lower", report.log2_materialization_lower},
               {"desk_feasible", report.desk_feasible},
               {"verdict", report.verdict}},
          kPass};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lovasz local lemma toolkit: CSPs, Moser-Tardos runs, witness digraphs, local goodness, derandomization"};
  app.require_subcommand(1);
  app.fallthrough();
  Global global;
  app.add_option("--seed", global.seed, "PRNG seed for every random choice")->capture_default_str();
  app.add_option("--jobs", global.jobs, "worker threads for trial fan-out")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--materialization-cap", global.materialization_cap, "max explicit assignments per constraint (env LLL_MATERIALIZATION_CAP)");
  app.add_option("--node-cap", global.node_cap, "max local goodness search states (env LLL_SEARCH_NODE_CAP)");
  app.add_option("--enum-cap", global.enum_cap, "max enumerated witness digraphs (env LLL_ENUM_CAP)");
  app.add_flag("--compact", global.compact, "single-line JSON output");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "emit a problem (or circulant graph) as JSON");
  generate->add_option("--kind", gen.kind, "coloring | sinkless | hypergraph | circulant")->required();
  generate->add_option("--graph", gen.graph, "graph file (JSON or 'u v' lines)");
  generate->add_option("--hypergraph", gen.hypergraph, "hypergraph JSON file");
  generate->add_option("--k", gen.k, "number of colors")->capture_default_str();
  generate->add_option("--n", gen.n, "vertices of a circulant graph (also a base graph for coloring/sinkless)");
  generate->add_option("--offsets", gen.offsets, "circulant offsets")->delimiter(',');

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "order, degrees, p and LLL conditions");
  stats_cmd->add_option("--problem", stats.problem)->required();
  stats_cmd->add_option("--s", stats.s, "exponent for the p (e(d+1))^s < 1 check");

  GrowthArgs growth;
  auto* growth_cmd = app.add_subcommand("growth", "ball growth profile of a graph or dependency graph");
  growth_cmd->add_option("--problem", growth.problem);
  growth_cmd->add_option("--graph", growth.graph);
  growth_cmd->add_option("--max-radius", growth.max_radius)->capture_default_str();

  MtaArgs mta;
  auto* mta_cmd = app.add_subcommand("mta", "run the Moser-Tardos algorithm");
  mta_cmd->add_option("--problem", mta.problem)->required();
  mta_cmd->add_option("--depth", mta.depth)->capture_default_str()->check(CLI::PositiveNumber);
  mta_cmd->add_option("--trials", mta.trials, "Monte Carlo trials (0 = single run)")->capture_default_str();
  mta_cmd->add_option("--strategy", mta.strategy, "mmta | random | first")->capture_default_str();
  mta_cmd->add_option("--table", mta.table, "table JSON for a replayed run");
  mta_cmd->add_option("--script", mta.script, "sequence JSON for a scripted run");
  mta_cmd->add_option("--save-table", mta.save_table, "write the table used by a single run");
  mta_cmd->add_option("--max-iters", mta.max_iters);
  mta_cmd->add_flag("--trace", mta.trace, "record every iteration");

  ConsistencyArgs cons;
  auto* cons_cmd = app.add_subcommand("consistency", "check a sequence against a table");
  cons_cmd->add_option("--problem", cons.problem)->required();
  cons_cmd->add_option("--table", cons.table)->required();
  cons_cmd->add_option("--sequence", cons.sequence)->required();

  WitnessArgs wit;
  auto* wit_cmd = app.add_subcommand("witness", "build, validate, compare or enumerate witness digraphs");
  wit_cmd->add_option("--problem", wit.problem)->required();
  wit_cmd->add_option("--sequence", wit.sequence, "build the full witness digraph of a sequence");
  wit_cmd->add_option("--witness", wit.witness, "witness digraph JSON");
  wit_cmd->add_option("--table", wit.table, "check compatibility with this table");
  wit_cmd->add_option("--enumerate", wit.enumerate_c, "list single-sink representatives for this constraint");
  wit_cmd->add_option("--max-vertices", wit.max_vertices)->capture_default_str();

  Mt1Args mt1;
  auto* mt1_cmd = app.add_subcommand("verify-mt1", "compatibility probability versus the product of bad masses");
  mt1_cmd->add_option("--problem", mt1.problem)->required();
  mt1_cmd->add_option("--witness", mt1.witness)->required();
  mt1_cmd->add_flag("--exact", mt1.exact, "exact enumeration of the relevant table cells");
  mt1_cmd->add_option("--trials", mt1.trials, "Monte Carlo trials");
  mt1_cmd->add_option("--depth", mt1.depth)->capture_default_str();

  Mt2Args mt2;
  auto* mt2_cmd = app.add_subcommand("verify-mt2", "partial sums over single-sink witness digraphs");
  mt2_cmd->add_option("--problem", mt2.problem)->required();
  mt2_cmd->add_option("--c", mt2.c)->required();
  mt2_cmd->add_option("--alpha", mt2.alpha, "one value or a comma list (default: bad masses)");
  mt2_cmd->add_option("--beta", mt2.beta, "one value or a comma list")->required();
  mt2_cmd->add_option("--max-vertices", mt2.max_vertices)->capture_default_str();

  LocalArgs local;
  auto* local_cmd = app.add_subcommand("locally-good", "search for bounded Folner sequences");
  local_cmd->add_option("--problem", local.problem)->required();
  local_cmd->add_option("--table", local.table)->required();
  local_cmd->add_option("--c", local.c, "constraint (default: all)");
  local_cmd->add_option("--R", local.R)->capture_default_str();
  local_cmd->add_option("--N", local.N)->capture_default_str();
  local_cmd->add_option("--eps", local.eps)->required();

  LbadArgs lbad;
  auto* lbad_cmd = app.add_subcommand("lbad", "Monte Carlo frequency of tables that are not locally good");
  lbad_cmd->add_option("--problem", lbad.problem)->required();
  lbad_cmd->add_option("--c", lbad.c)->capture_default_str();
  lbad_cmd->add_option("--R", lbad.R)->capture_default_str();
  lbad_cmd->add_option("--N", lbad.N)->capture_default_str();
  lbad_cmd->add_option("--depth", lbad.depth)->capture_default_str();
  lbad_cmd->add_option("--trials", lbad.trials)->capture_default_str();
  lbad_cmd->add_option("--eps", lbad.eps)->required();
  lbad_cmd->add_option("--eta", lbad.eta)->required();
  lbad_cmd->add_option("--p", lbad.p)->required();
  lbad_cmd->add_option("--d", lbad.d)->required();
  lbad_cmd->add_option("--s", lbad.s)->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "deterministic solvers");
  solve_cmd->add_option("--problem", solve.problem)->required();
  solve_cmd->add_option("--method", solve.method, "double-exp | edgeless | pipeline")->capture_default_str();
  solve_cmd->add_option("--params", solve.params, "pipeline parameter JSON");
  solve_cmd->add_option("--mode", solve.mode, "det | rand")->capture_default_str();
  solve_cmd->add_option("--trials", solve.trials, "randomized pipeline attempts")->capture_default_str();
  solve_cmd->add_flag("--ledger", solve.ledger, "include the per-class mass ledger");

  AdvisorArgs adv;
  auto* adv_cmd = app.add_subcommand("advisor", "choose eps, R, eta, N and report feasibility");
  adv_cmd->add_option("--problem", adv.problem);
  adv_cmd->add_option("--graph", adv.graph, "dependency graph given directly");
  adv_cmd->add_option("--p", adv.p);
  adv_cmd->add_option("--d", adv.d);
  adv_cmd->add_option("--s", adv.s)->required();
  adv_cmd->add_option("--eps", adv.eps, "override the chosen eps");
  adv_cmd->add_option("--max-radius", adv.max_radius)->capture_default_str();

  SolveArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "locally good table, then the maximal algorithm");
  pipe_cmd->add_option("--problem", pipe.problem)->required();
  pipe_cmd->add_option("--params", pipe.params)->required();
  pipe_cmd->add_option("--mode", pipe.mode, "det | rand")->capture_default_str();
  pipe_cmd->add_option("--trials", pipe.trials, "randomized attempts")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  Session session(global);
  Json params = Json::object();
  const auto start = std::chrono::steady_clock::now();
  const CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  Json report{{"command", command}};
  int code = kPass;
  try {
    if (chosen == generate) {
      std::cout << run_generate(session, gen).dump(global.compact ? -1 : 2) << "\n";
      return kPass;
    }
    Outcome outcome;
    if (chosen == stats_cmd) outcome = run_stats(session, params, stats);
    else if (chosen == growth_cmd) outcome = run_growth(session, params, growth);
    else if (chosen == mta_cmd) outcome = run_mta(session, params, mta);
    else if (chosen == cons_cmd) outcome = run_consistency(session, params, cons);
    else if (chosen == wit_cmd) outcome = run_witness(session, params, wit);
    else if (chosen == mt1_cmd) outcome = run_verify_mt1(session, params, mt1);
    else if (chosen == mt2_cmd) outcome = run_verify_mt2(session, params, mt2);
    else if (chosen == local_cmd) outcome = run_locally_good(session, params, local);
    else if (chosen == lbad_cmd) outcome = run_lbad(session, params, lbad);
    else if (chosen == solve_cmd) outcome = run_solve(session, params, solve);
    else if (chosen == adv_cmd) outcome = run_advisor(session, params, adv);
    else outcome = run_pipeline(session, params, pipe);
    report["results"] = outcome.results;
    code = outcome.code;
  } catch (const Error& e) {
    code = exit_code(e.kind());
    if (code == kExhausted) session.event(std::string(lll::to_string(e.kind())) + ": " + e.what());
    report["results"] = nullptr;
    report["error"] = Json{{"kind", lll::to_string(e.kind())}, {"message", e.what()}};
    std::cerr << "error (" << lll::to_string(e.kind()) << "): " << e.what() << "\n";
    if (chosen == generate) return code;
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  report["inputs_digest"] = session.digest();
  report["parameters"] = params;
  report["timing_ms"] = elapsed.count();
  report["events"] = session.events();
  report["seed"] = global.seed;
  std::cout << report.dump(global.compact ? -1 : 2) << "\n";
  return code;
}
