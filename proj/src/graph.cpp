#include "lll/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "lll/error.hpp"
#include "lll/rational.hpp"

namespace lll {

FiniteGraph::FiniteGraph(std::size_t n, std::span<const Edge> edges) : adjacency_(n) {
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error(ErrorKind::invalid_input, "edge {" + std::to_string(u) + "," + std::to_string(v) +
                                                "} out of range for " + std::to_string(n) + " vertices");
    }
    if (u == v) throw Error(ErrorKind::invalid_input, "self-loop at vertex " + std::to_string(u));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::size_t FiniteGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& list : adjacency_) best = std::max(best, list.size());
  return best;
}

std::size_t FiniteGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

bool FiniteGraph::has_edge(Vertex u, Vertex v) const {
  const auto& list = adjacency_.at(u);
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<Edge> FiniteGraph::edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < adjacency_.size(); ++u) {
    for (Vertex v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<std::optional<std::size_t>> bfs_distances(const FiniteGraph& g, Vertex source) {
  if (source >= g.size()) throw Error(ErrorKind::invalid_input, "vertex " + std::to_string(source) + " out of range");
  std::vector<std::optional<std::size_t>> dist(g.size());
  std::deque<Vertex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : g.neighbors(u)) {
      if (!dist[w]) {
        dist[w] = *dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<Vertex> ball(const FiniteGraph& g, Vertex v, std::size_t radius) {
  if (v >= g.size()) throw Error(ErrorKind::invalid_input, "vertex " + std::to_string(v) + " out of range");
  std::vector<std::size_t> dist(g.size(), SIZE_MAX);
  std::vector<Vertex> members{v};
  dist[v] = 0;
  for (std::size_t head = 0; head < members.size(); ++head) {
    Vertex u = members[head];
    if (dist[u] == radius) continue;
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == SIZE_MAX) {
        dist[w] = dist[u] + 1;
        members.push_back(w);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

std::size_t GrowthProfile::gamma_at(std::size_t r) const {
  if (r == 0) return saturated_gamma == 0 ? 0 : 1;
  if (r >= saturation_radius && saturation_radius > 0) return saturated_gamma;
  if (r <= gamma.size()) return gamma[r - 1];
  throw Error(ErrorKind::invalid_parameter,
              "radius " + std::to_string(r) + " beyond the profiled range " + std::to_string(gamma.size()));
}

double GrowthProfile::proxy_value() const {
  if (proxy_radius == 0) return 0.0;
  return std::pow(static_cast<double>(proxy_gamma), 1.0 / static_cast<double>(proxy_radius));
}

namespace {

std::size_t size_of_component(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  return total;
}

}  // namespace

GrowthProfile growth_profile(const FiniteGraph& g, std::size_t max_radius) {
  if (max_radius < 1) throw Error(ErrorKind::invalid_parameter, "growth profile needs max_radius >= 1");
  GrowthProfile profile;
  profile.gamma.assign(max_radius, 0);
  std::size_t eccentricity_max = 0;
  for (Vertex v = 0; v < g.size(); ++v) {
    // counts[k] = vertices at distance exactly k from v
    std::vector<std::size_t> counts;
    for (const auto& d : bfs_distances(g, v)) {
      if (!d) continue;
      if (*d >= counts.size()) counts.resize(*d + 1, 0);
      ++counts[*d];
    }
    eccentricity_max = std::max(eccentricity_max, counts.size() - 1);
    std::size_t size = 0;
    for (std::size_t r = 0; r <= max_radius; ++r) {
      if (r < counts.size()) size += counts[r];
      if (r > 0) profile.gamma[r - 1] = std::max(profile.gamma[r - 1], size);
    }
    profile.saturated_gamma = std::max(profile.saturated_gamma, size_of_component(counts));
  }
  profile.saturation_radius = std::max<std::size_t>(eccentricity_max, 1);

  // argmin_r gamma(r)^(1/r), compared exactly via gamma(a)^b < gamma(b)^a.
  for (std::size_t r = 1; r <= max_radius; ++r) {
    std::size_t value = profile.gamma[r - 1];
    if (profile.proxy_radius == 0) {
      profile.proxy_radius = r;
      profile.proxy_gamma = value;
      continue;
    }
    BigInt lhs = pow(BigInt(static_cast<unsigned long>(value)), profile.proxy_radius);
    BigInt rhs = pow(BigInt(static_cast<unsigned long>(profile.proxy_gamma)), r);
    if (lhs < rhs) {
      profile.proxy_radius = r;
      profile.proxy_gamma = value;
    }
  }
  return profile;
}

FiniteGraph circulant_graph(std::size_t n, std::span<const std::size_t> offsets) {
  std::vector<Edge> edges;
  for (std::size_t o : offsets) {
    if (n == 0 || o % n == 0) throw Error(ErrorKind::invalid_input, "circulant offsets must be nonzero modulo n");
    for (Vertex i = 0; i < n; ++i) edges.emplace_back(i, (i + o) % n);
  }
  return FiniteGraph(n, edges);
}

FiniteGraph power_graph(const FiniteGraph& g, std::size_t r) {
  if (r < 1) throw Error(ErrorKind::invalid_parameter, "graph power needs r >= 1");
  std::vector<Edge> edges;
  for (Vertex x = 0; x < g.size(); ++x) {
    for (Vertex y : ball(g, x, r)) {
      if (x < y) edges.emplace_back(x, y);
    }
  }
  return FiniteGraph(g.size(), edges);
}

std::vector<std::size_t> greedy_proper_coloring(const FiniteGraph& g) {
  constexpr std::size_t kUncolored = SIZE_MAX;
  std::vector<std::size_t> color(g.size(), kUncolored);
  std::vector<bool> taken;
  for (Vertex v = 0; v < g.size(); ++v) {
    taken.assign(g.degree(v) + 1, false);
    for (Vertex w : g.neighbors(v)) {
      if (color[w] != kUncolored && color[w] < taken.size()) taken[color[w]] = true;
    }
    color[v] = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
  }
  return color;
}

std::vector<Vertex> maximal_independent_set(const FiniteGraph& g, std::span<const Vertex> eligible) {
  std::vector<Vertex> candidates(eligible.begin(), eligible.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<bool> blocked(g.size(), false);
  std::vector<Vertex> chosen;
  for (Vertex v : candidates) {
    if (v >= g.size()) throw Error(ErrorKind::invalid_input, "vertex " + std::to_string(v) + " out of range");
    if (blocked[v]) continue;
    chosen.push_back(v);
    for (Vertex w : g.neighbors(v)) blocked[w] = true;
  }
  return chosen;
}

}  // namespace lll
