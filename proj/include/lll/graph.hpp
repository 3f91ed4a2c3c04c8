#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lll {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Finite simple undirected graph with sorted adjacency lists.
class FiniteGraph {
 public:
  FiniteGraph() = default;

  /// Builds a graph on vertices 0..n-1. Duplicate edges are merged;
  /// self-loops and out-of-range endpoints throw invalid_input.
  FiniteGraph(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const { return adjacency_.size(); }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  std::size_t max_degree() const;
  std::size_t edge_count() const;
  bool has_edge(Vertex u, Vertex v) const;

  /// Edges as (lower, higher) pairs in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const FiniteGraph&, const FiniteGraph&) = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Unweighted distances from `source`; unreachable vertices get nullopt.
std::vector<std::optional<std::size_t>> bfs_distances(const FiniteGraph& g, Vertex source);

/// B_G(v, radius) in increasing vertex order.
std::vector<Vertex> ball(const FiniteGraph& g, Vertex v, std::size_t radius);

/// Ball sizes gamma(1..max_radius), the finite-radius growth-rate proxy
/// min_r gamma(r)^(1/r), and the radius past which no ball grows.
struct GrowthProfile {
  std::vector<std::size_t> gamma;  // gamma[r - 1] = gamma_G(r)
  std::size_t proxy_radius = 0;
  std::size_t proxy_gamma = 0;
  std::size_t saturation_radius = 0;
  std::size_t saturated_gamma = 0;

  std::size_t max_radius() const { return gamma.size(); }

  /// gamma_G(r) for any r, using saturation beyond the computed range.
  /// gamma_at(0) is 1 for nonempty graphs.
  std::size_t gamma_at(std::size_t r) const;

  /// proxy_gamma^(1/proxy_radius) in floating point, for display only.
  double proxy_value() const;
};

GrowthProfile growth_profile(const FiniteGraph& g, std::size_t max_radius);

/// Circulant graph on 0..n-1: i ~ i +- o (mod n) for every offset o.
FiniteGraph circulant_graph(std::size_t n, std::span<const std::size_t> offsets);

/// G^r: x ~ y iff 1 <= dist(x, y) <= r.
FiniteGraph power_graph(const FiniteGraph& g, std::size_t r);

/// Smallest-available-color greedy in vertex-id order; uses at most
/// max_degree + 1 colors.
std::vector<std::size_t> greedy_proper_coloring(const FiniteGraph& g);

/// Greedy maximal independent subset of `eligible`, scanning by vertex id.
std::vector<Vertex> maximal_independent_set(const FiniteGraph& g, std::span<const Vertex> eligible);

}  // namespace lll
