#include "lll/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "lll/error.hpp"

namespace lll::io {

namespace {

template <class F>
auto guarded(const char* what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(std::to_string(j.get<long long>())));
  throw Error(ErrorKind::invalid_input, "expected a rational as \"a/b\" or an integer");
}

std::size_t natural(const Json& j, const char* key) {
  const Json& value = j.at(key);
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
    throw Error(ErrorKind::invalid_input, std::string("field '") + key + "' must be a nonnegative integer");
  }
  return value.get<std::size_t>();
}

std::vector<std::size_t> naturals(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::invalid_input, "expected an array of nonnegative integers");
  std::vector<std::size_t> out;
  for (const auto& x : j) {
    if (!x.is_number_unsigned()) throw Error(ErrorKind::invalid_input, "expected a nonnegative integer");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

Json edge_list(const std::vector<Edge>& edges) {
  Json out = Json::array();
  for (auto [u, v] : edges) out.push_back(Json::array({u, v}));
  return out;
}

std::vector<Edge> edges_from_json(const Json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j) {
    auto pair = naturals(e);
    if (pair.size() != 2) throw Error(ErrorKind::invalid_input, "an edge must have exactly two endpoints");
    edges.emplace_back(pair[0], pair[1]);
  }
  return edges;
}

}  // namespace

Csp csp_from_json(const Json& j, std::uint64_t cap) {
  return guarded("problem", [&] {
    const std::size_t n = natural(j, "variables");
    std::size_t k = 0;
    std::vector<Rational> weights;
    const Json& labels = j.at("labels");
    if (labels.is_number_unsigned()) {
      k = labels.get<std::size_t>();
    } else {
      k = natural(labels, "count");
      if (labels.contains("weights")) {
        for (const auto& w : labels.at("weights")) weights.push_back(rational_from_json(w));
        if (weights.size() != k) throw Error(ErrorKind::invalid_input, "weights must list one entry per label");
      }
    }
    if (k == 0) throw Error(ErrorKind::invalid_input, "label count must be positive");
    if (weights.empty()) weights.assign(k, Rational(1, static_cast<unsigned long>(k)));
    std::vector<Constraint> constraints;
    for (const auto& c : j.at("constraints")) {
      const std::size_t id = c.contains("id") ? natural(c, "id") : constraints.size();
      std::vector<std::vector<LabelId>> bad;
      for (const auto& tuple : c.at("bad")) bad.push_back(naturals(tuple));
      auto domain = naturals(c.at("domain"));
      if (!assignment_space(k, domain.size(), cap)) {
        throw Error(ErrorKind::cap_exceeded, "constraint " + std::to_string(id) + " exceeds the materialization cap");
      }
      constraints.push_back(make_constraint(id, std::move(domain), bad, k));
    }
    std::sort(constraints.begin(), constraints.end(), [](const Constraint& a, const Constraint& b) { return a.id < b.id; });
    return Csp(n, std::move(weights), std::move(constraints), cap);
  });
}

Json to_json(const Csp& csp) {
  Json weights = Json::array();
  for (const auto& w : csp.weights()) weights.push_back(to_string(w));
  Json constraints = Json::array();
  for (const auto& con : csp.constraints()) {
    Json bad = Json::array();
    for (AssignmentCode code : con.bad) bad.push_back(decode_assignment(code, con.domain.size(), csp.num_labels()));
    constraints.push_back(Json{{"id", con.id}, {"domain", con.domain}, {"bad", bad}});
  }
  return Json{{"variables", csp.num_variables()},
              {"labels", Json{{"count", csp.num_labels()}, {"weights", weights}}},
              {"constraints", constraints}};
}

FiniteGraph graph_from_json(const Json& j) {
  return guarded("graph", [&] { return FiniteGraph(natural(j, "n"), edges_from_json(j.at("edges"))); });
}

Json to_json(const FiniteGraph& g) { return Json{{"n", g.size()}, {"edges", edge_list(g.edges())}}; }

FiniteGraph graph_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Edge> edges;
  std::optional<std::size_t> declared;
  std::size_t n = 0;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first.front() == '#') {
      std::string tag;
      std::size_t count = 0;
      std::istringstream header(line.substr(line.find('#') + 1));
      if (edges.empty() && !declared && header >> tag && tag == "n" && header >> count) declared = count;
      continue;
    }
    std::istringstream pair(line);
    long long u = -1, v = -1;
    std::string rest;
    if (!(pair >> u >> v) || u < 0 || v < 0 || (pair >> rest && rest.front() != '#')) {
      throw Error(ErrorKind::invalid_input, "line " + std::to_string(line_number) + ": expected \"u v\"");
    }
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    n = std::max({n, static_cast<std::size_t>(u) + 1, static_cast<std::size_t>(v) + 1});
  }
  return FiniteGraph(declared.value_or(n), edges);
}

Hypergraph hypergraph_from_json(const Json& j) {
  return guarded("hypergraph", [&] {
    Hypergraph h;
    h.n = natural(j, "n");
    for (const auto& e : j.at("hyperedges")) h.hyperedges.push_back(naturals(e));
    return h;
  });
}

Json to_json(const Hypergraph& h) {
  Json edges = Json::array();
  for (const auto& e : h.hyperedges) edges.push_back(e);
  return Json{{"n", h.n}, {"hyperedges", edges}};
}

Table table_from_json(const Json& j) {
  return guarded("table", [&] {
    std::vector<std::vector<LabelId>> rows;
    for (const auto& row : j.at("rows")) rows.push_back(naturals(row));
    if (j.contains("depth") && natural(j, "depth") != rows.size()) {
      throw Error(ErrorKind::invalid_input, "table depth does not match the number of rows");
    }
    return Table::from_rows(rows);
  });
}

Json to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows()) rows.push_back(row);
  return Json{{"depth", t.depth()}, {"rows", rows}};
}

MtSequence sequence_from_json(const Json& j) {
  return guarded("sequence", [&] {
    MtSequence seq;
    for (const auto& step : j.at("steps")) {
      auto ids = naturals(step);
      std::sort(ids.begin(), ids.end());
      seq.steps.push_back(std::move(ids));
    }
    return seq;
  });
}

Json to_json(const MtSequence& seq) {
  Json steps = Json::array();
  for (const auto& step : seq.steps) steps.push_back(step);
  return Json{{"steps", steps}};
}

WitnessDigraph witness_from_json(const Json& j) {
  return guarded("witness", [&] {
    const auto& vertices = j.at("vertices");
    std::vector<std::optional<ConstraintId>> decoration(vertices.size());
    for (const auto& v : vertices) {
      const std::size_t id = natural(v, "id");
      if (id >= decoration.size() || decoration[id]) throw Error(ErrorKind::invalid_input, "witness vertex ids must be 0..n-1 without repeats");
      decoration[id] = natural(v, "constraint");
    }
    std::vector<ConstraintId> dense;
    for (const auto& d : decoration) dense.push_back(*d);
    return WitnessDigraph(std::move(dense), edges_from_json(j.at("edges")));
  });
}

Json to_json(const WitnessDigraph& g) {
  Json vertices = Json::array();
  for (std::size_t x = 0; x < g.size(); ++x) vertices.push_back(Json{{"id", x}, {"constraint", g.decoration(x)}});
  return Json{{"vertices", vertices}, {"edges", edge_list(g.edges())}};
}

Json to_json(const GrowthProfile& profile) {
  return Json{{"gamma", profile.gamma},
              {"proxy", Json{{"radius", profile.proxy_radius}, {"gamma", profile.proxy_gamma}, {"value", profile.proxy_value()}}},
              {"saturation", Json{{"radius", profile.saturation_radius}, {"gamma", profile.saturated_gamma}}}};
}

Json to_json(const PartialLabeling& f) {
  Json labels = Json::array();
  for (VariableId v = 0; v < f.size(); ++v) {
    if (f.is_defined(v)) {
      labels.push_back(f.at(v));
    } else {
      labels.push_back(nullptr);
    }
  }
  return Json{{"assignment", labels}};
}

Json to_json(const RunTrace& trace, bool include_iterations) {
  Json out{{"status", to_string(trace.status)},
           {"iterations_run", trace.iterations_run},
           {"resamples", trace.resamples},
           {"final_level", trace.final_level},
           {"assignment", to_json(trace.result)["assignment"]},
           {"realized", to_json(trace.realized)["steps"]}};
  if (include_iterations) {
    Json iterations = Json::array();
    for (const auto& it : trace.iterations) {
      iterations.push_back(Json{{"level", it.level}, {"labeling", it.labeling}, {"violated", it.violated}, {"chosen", it.chosen}});
    }
    out["iterations"] = iterations;
  }
  return out;
}

Json to_json(const PipelineParams& params) {
  return Json{{"p", to_string(params.p)},     {"d", params.d},    {"s", to_string(params.s)},
              {"eps", to_string(params.eps)}, {"eta", to_string(params.eta)}, {"R", params.R},
              {"N", params.N},                {"depth", params.depth}};
}

PipelineParams params_from_json(const Json& j) {
  return guarded("parameters", [&] {
    PipelineParams params;
    if (j.contains("p")) params.p = rational_from_json(j.at("p"));
    if (j.contains("d")) params.d = natural(j, "d");
    if (j.contains("s")) params.s = rational_from_json(j.at("s"));
    if (j.contains("eta")) params.eta = rational_from_json(j.at("eta"));
    params.eps = rational_from_json(j.at("eps"));
    params.R = natural(j, "R");
    params.N = natural(j, "N");
    params.depth = natural(j, "depth");
    return params;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("invalid JSON: ") + e.what());
  }
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) h = (h ^ ch) * 1099511628211ULL;
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

}  // namespace lll::io
