#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "doppel/graph.hpp"
#include "doppel/random.hpp"

namespace doppel::testing {

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<Edge> e;
  for (auto [u, v] : edges) e.push_back({u, v});
  return Graph::from_edges(n, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return Graph::from_edges(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>((u + 1) % n)});
  return Graph::from_edges(n, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u + 1 < n; ++u) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(u + 1)});
  return Graph::from_edges(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t v = 1; v <= leaves; ++v) e.push_back({0, static_cast<NodeId>(v)});
  return Graph::from_edges(leaves + 1, e);
}

inline Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
  }
  return Graph::from_edges(n, e);
}

/// Two communities of `size` nodes, dense inside, sparse across, connected.
inline Graph planted_partition(std::size_t size, double p_in, double p_out, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 2 * size;
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const bool same = (u < size) == (v < size);
      if (rng.uniform() < (same ? p_in : p_out)) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
  }
  // A spanning path keeps the graph connected whatever the draw.
  for (std::size_t u = 0; u + 1 < n; ++u) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(u + 1)});
  return Graph::from_edges(n, e);
}

inline std::vector<int> sorted_desc(std::vector<int> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// Brute-force subgraph counts over explicit node subsets.

inline std::uint64_t brute_triangles(const Graph& g) {
  const auto n = static_cast<NodeId>(g.node_count());
  std::uint64_t c = 0;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      for (NodeId d = b + 1; d < n; ++d) c += g.has_edge(a, b) && g.has_edge(a, d) && g.has_edge(b, d);
  return c;
}

inline std::uint64_t brute_four_cliques(const Graph& g) {
  const auto n = static_cast<NodeId>(g.node_count());
  std::uint64_t c = 0;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      for (NodeId x = b + 1; x < n; ++x)
        for (NodeId y = x + 1; y < n; ++y) {
          const std::array<NodeId, 4> s{a, b, x, y};
          bool all = true;
          for (int i = 0; i < 4 && all; ++i)
            for (int j = i + 1; j < 4 && all; ++j) all = g.has_edge(s[i], s[j]);
          c += all;
        }
  return c;
}

/// Paths u-v-w counted by their centre v, from explicit triples.
inline std::uint64_t brute_wedges(const Graph& g) {
  const auto n = static_cast<NodeId>(g.node_count());
  std::uint64_t c = 0;
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u = 0; u < n; ++u)
      for (NodeId w = u + 1; w < n; ++w) c += u != v && w != v && g.has_edge(u, v) && g.has_edge(v, w);
  return c;
}

/// Stars with three leaves, from explicit 4-tuples.
inline std::uint64_t brute_claws(const Graph& g) {
  const auto n = static_cast<NodeId>(g.node_count());
  std::uint64_t c = 0;
  for (NodeId v = 0; v < n; ++v)
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        for (NodeId x = b + 1; x < n; ++x)
          c += a != v && b != v && x != v && g.has_edge(v, a) && g.has_edge(v, b) && g.has_edge(v, x);
  return c;
}

/// Whether some simple graph on degrees.size() nodes has exactly these
/// degrees, by enumerating every edge subset (n ≤ 6).
inline bool brute_graphic(const std::vector<int>& degrees) {
  const int n = static_cast<int>(degrees.size());
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  const std::uint32_t total = 1u << pairs.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    std::vector<int> d(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (mask >> k & 1u) {
        ++d[static_cast<std::size_t>(pairs[k].first)];
        ++d[static_cast<std::size_t>(pairs[k].second)];
      }
    }
    if (d == degrees) return true;
  }
  return false;
}

}  // namespace doppel::testing
