#include "doppel/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

namespace doppel {

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges,
                        BuildStats* stats) {
  BuildStats local;
  std::vector<Edge> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= node_count ||
        static_cast<std::size_t>(e.v) >= node_count) {
      throw ContractViolation("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                              ") outside node range " + std::to_string(node_count));
    }
    if (e.u == e.v) {
      ++local.self_loops;
      continue;
    }
    arcs.push_back({e.u, e.v});
    arcs.push_back({e.v, e.u});
  }
  std::sort(arcs.begin(), arcs.end());
  auto last = std::unique(arcs.begin(), arcs.end());
  local.duplicates = static_cast<std::size_t>(arcs.end() - last) / 2;
  arcs.erase(last, arcs.end());

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  for (const Edge& a : arcs) ++g.offsets_[a.u + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.targets_.reserve(arcs.size());
  for (const Edge& a : arcs) g.targets_.push_back(a.v);
  if (stats) *stats = local;
  return g;
}

Graph Graph::from_adjacency(const std::vector<std::vector<NodeId>>& adjacency) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    for (NodeId v : adjacency[u]) {
      if (static_cast<NodeId>(u) < v) edges.push_back({static_cast<NodeId>(u), v});
    }
  }
  Graph g = from_edges(adjacency.size(), edges);
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    if (g.degree(static_cast<NodeId>(u)) != adjacency[u].size()) {
      throw ContractViolation("adjacency is not symmetric at node " + std::to_string(u));
    }
  }
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(static_cast<NodeId>(u))) {
      if (static_cast<NodeId>(u) < v) out.push_back({static_cast<NodeId>(u), v});
    }
  }
  return out;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> out(node_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = static_cast<int>(degree(static_cast<NodeId>(v)));
  return out;
}

Graph Graph::relabeled(std::span<const NodeId> perm) const {
  if (perm.size() != node_count()) throw ContractViolation("relabel: permutation size mismatch");
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (const Edge& e : edges()) out.push_back({perm[e.u], perm[e.v]});
  return from_edges(node_count(), out);
}

DegreeSequence::DegreeSequence(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  std::sort(degrees_.begin(), degrees_.end(), std::greater<>());
}

long long DegreeSequence::sum() const {
  return std::accumulate(degrees_.begin(), degrees_.end(), 0LL);
}

NodeCorrespondence NodeCorrespondence::identity(std::size_t n) {
  NodeCorrespondence c;
  c.mapping.resize(n);
  std::iota(c.mapping.begin(), c.mapping.end(), 0);
  return c;
}

bool NodeCorrespondence::is_bijection() const {
  std::vector<char> seen(mapping.size(), 0);
  for (NodeId m : mapping) {
    if (m < 0 || static_cast<std::size_t>(m) >= mapping.size() || seen[m]) return false;
    seen[m] = 1;
  }
  return true;
}

InducedSubgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> local(g.node_count(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  std::vector<Edge> edges;
  for (NodeId u : nodes) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && local[v] >= 0) edges.push_back({local[u], local[v]});
    }
  }
  return {Graph::from_edges(nodes.size(), edges),
          std::vector<NodeId>(nodes.begin(), nodes.end())};
}

std::vector<NodeId> connected_components(const Graph& g, std::size_t* count) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> label(n, -1);
  NodeId next = 0;
  std::vector<NodeId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = static_cast<std::size_t>(next);
  return label;
}

InducedSubgraph largest_connected_component_with_ids(const Graph& g) {
  if (g.empty()) return {};
  std::size_t count = 0;
  auto label = connected_components(g, &count);
  std::vector<std::size_t> size(count, 0);
  for (NodeId l : label) ++size[l];
  // Labels follow smallest member id, so max_element's first hit is the tie winner.
  const auto best = static_cast<NodeId>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<NodeId> nodes;
  nodes.reserve(size[best]);
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (label[v] == best) nodes.push_back(static_cast<NodeId>(v));
  }
  return induced_subgraph(g, nodes);
}

Graph largest_connected_component(const Graph& g) {
  return largest_connected_component_with_ids(g).graph;
}

DegreeSequence degree_sequence(const Graph& g) { return DegreeSequence(g.degrees()); }

bool is_graphic(std::span<const int> degrees) {
  std::vector<long long> d(degrees.begin(), degrees.end());
  std::sort(d.begin(), d.end(), std::greater<>());
  const std::size_t n = d.size();
  if (n == 0) return true;
  if (d.back() < 0) return false;
  long long total = std::accumulate(d.begin(), d.end(), 0LL);
  if (total % 2 != 0) return false;

  // Σ_{i≤k} d_i ≤ k(k-1) + Σ_{i>k} min(d_i, k); the tail sum is maintained with
  // a pointer to the first index whose degree drops below k.
  std::vector<long long> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + d[i];
  long long prefix = 0;
  std::size_t below = n;  // first index with d < k, searched from the right
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += d[k - 1];
    const long long kk = static_cast<long long>(k);
    while (below > 0 && d[below - 1] < kk) --below;
    // indices >= max(k, below) have d < k; those in [k, below) have d >= k
    const std::size_t split = std::max(k, below);
    const long long tail = static_cast<long long>(split - k) * kk + suffix[split];
    if (prefix > kk * (kk - 1) + tail) return false;
  }
  return true;
}

double edge_overlap(const Graph& g, const Graph& g0, const NodeCorrespondence& corr) {
  if (g.node_count() != g0.node_count()) {
    throw ContractViolation("edge_overlap: node counts differ (" + std::to_string(g.node_count()) +
                            " vs " + std::to_string(g0.node_count()) + ")");
  }
  if (corr.size() != g.node_count() || !corr.is_bijection()) {
    throw ContractViolation("edge_overlap: correspondence is not a bijection on the node set");
  }
  if (g0.edge_count() == 0) return 0.0;
  std::size_t shared = 0;
  for (const Edge& e : g.edges()) {
    if (g0.has_edge(corr.mapping[e.u], corr.mapping[e.v])) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(g0.edge_count());
}

}  // namespace doppel
