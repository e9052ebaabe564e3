#include "doppel/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "doppel/random.hpp"

namespace doppel {

Graph er_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("er_graph: p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
  }
  return Graph::from_edges(n, edges);
}

Graph ba_graph(std::size_t n, int m, std::uint64_t seed) {
  if (m < 1 || static_cast<std::size_t>(m) >= n) throw ContractViolation("ba_graph: requires 1 <= m < n");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m) * (n - static_cast<std::size_t>(m)));
  std::vector<NodeId> targets(static_cast<std::size_t>(m));
  std::iota(targets.begin(), targets.end(), 0);
  std::vector<NodeId> urn;
  for (auto source = static_cast<NodeId>(m); static_cast<std::size_t>(source) < n; ++source) {
    for (NodeId t : targets) edges.push_back({t, source});
    urn.insert(urn.end(), targets.begin(), targets.end());
    urn.insert(urn.end(), static_cast<std::size_t>(m), source);
    std::set<NodeId> chosen;
    std::vector<NodeId> next;
    while (next.size() < static_cast<std::size_t>(m)) {
      const NodeId pick = urn[rng.below(urn.size())];
      if (chosen.insert(pick).second) next.push_back(pick);
    }
    targets = std::move(next);
  }
  return Graph::from_edges(n, edges);
}

Graph chung_lu(std::span<const int> degrees, std::uint64_t seed) {
  double total = 0.0;
  for (int d : degrees) {
    if (d < 0) throw ContractViolation("chung_lu: negative degree");
    total += d;
  }
  const std::size_t n = degrees.size();
  std::vector<Edge> edges;
  if (total == 0.0) return Graph::from_edges(n, edges);
  Rng rng(seed);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = std::min(static_cast<double>(degrees[u]) * degrees[v] / total, 1.0);
      if (rng.uniform() < p) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
  }
  return Graph::from_edges(n, edges);
}

Graph chung_lu(const DegreeSequence& s, std::uint64_t seed) { return chung_lu(s.values(), seed); }

ConfModelResult conf_model(const Graph& g0, double target_overlap, int max_retries, std::uint64_t seed) {
  if (!(target_overlap >= 0.0 && target_overlap <= 1.0)) {
    throw ContractViolation("conf_model: target_overlap must lie in [0, 1]");
  }
  if (max_retries < 1) throw ContractViolation("conf_model: max_retries must be at least 1");
  Rng rng(seed);
  std::vector<Edge> original = g0.edges();
  const std::size_t m = original.size();
  const auto keep = static_cast<std::size_t>(std::ceil(target_overlap * static_cast<double>(m) - 1e-9));

  ConfModelResult out;
  out.kept_edges = std::min(keep, m);
  for (std::size_t i = 0; i < out.kept_edges; ++i) {
    std::swap(original[i], original[i + rng.below(m - i)]);
  }
  std::vector<Edge> kept(original.begin(), original.begin() + static_cast<std::ptrdiff_t>(out.kept_edges));
  std::sort(kept.begin(), kept.end());

  std::vector<NodeId> stubs;
  for (std::size_t i = out.kept_edges; i < m; ++i) {
    stubs.push_back(original[i].u);
    stubs.push_back(original[i].v);
  }
  std::sort(stubs.begin(), stubs.end());

  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    out.attempts = attempt;
    std::vector<NodeId> pool = stubs;
    std::shuffle(pool.begin(), pool.end(), rng.engine());
    std::vector<Edge> edges = kept;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
      const NodeId a = std::min(pool[i], pool[i + 1]);
      const NodeId b = std::max(pool[i], pool[i + 1]);
      if (a == b) {
        ok = false;
        break;
      }
      edges.push_back({a, b});
    }
    if (!ok) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    out.graph = Graph::from_edges(g0.node_count(), edges);
    return out;
  }
  return out;
}

}  // namespace doppel
