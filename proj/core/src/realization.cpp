#include "doppel/realization.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace doppel {
namespace {

std::uint64_t fnv1a(std::span<const int> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : values) {
    auto x = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (x >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void check_targets(std::span<const int> targets) {
  for (int d : targets) {
    if (d < 0) throw ContractViolation("negative target degree");
  }
}

}  // namespace

void LinkProbabilityOracle::row(NodeId i, std::span<double> out) const {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = prob(i, static_cast<NodeId>(j));
}

MatrixOracle::MatrixOracle(std::size_t n, std::vector<double> row_major)
    : n_(n), p_(std::move(row_major)) {
  if (p_.size() != n * n) throw ContractViolation("MatrixOracle: table is not n×n");
}

RemainingDegreeQueue::RemainingDegreeQueue(std::span<const int> remaining)
    : remaining_(remaining.begin(), remaining.end()), queued_(remaining.size(), 0) {
  int max_degree = 0;
  for (int d : remaining_) max_degree = std::max(max_degree, d);
  buckets_.resize(static_cast<std::size_t>(max_degree) + 1);
  for (std::size_t v = 0; v < remaining_.size(); ++v) {
    if (remaining_[v] > 0) {
      buckets_[remaining_[v]].insert(static_cast<NodeId>(v));
      queued_[v] = 1;
    }
  }
  top_ = max_degree;
  settle_top();
}

NodeId RemainingDegreeQueue::top() const { return *buckets_[top_].begin(); }

void RemainingDegreeQueue::settle_top() {
  while (top_ >= 1 && buckets_[top_].empty()) --top_;
}

void RemainingDegreeQueue::decrement(NodeId v) {
  int& d = remaining_[v];
  if (queued_[v]) {
    buckets_[d].erase(v);
    if (d - 1 > 0) {
      buckets_[d - 1].insert(v);
    } else {
      queued_[v] = 0;
    }
  }
  --d;
  settle_top();
}

void RemainingDegreeQueue::remove(NodeId v) {
  if (!queued_[v]) return;
  buckets_[remaining_[v]].erase(v);
  queued_[v] = 0;
  settle_top();
}

std::string RealizationTrace::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    os << "step " << i << " hub " << s.hub << " attached ";
    if (s.attached.empty()) os << '-';
    for (std::size_t j = 0; j < s.attached.size(); ++j) os << (j ? "," : "") << s.attached[j];
    os << " rd " << std::hex << s.remaining_hash << std::dec;
    if (s.skipped) os << " skipped";
    os << '\n';
  }
  return os.str();
}

Graph RealizationTrace::replay(std::size_t node_count) const {
  std::vector<Edge> edges;
  for (const auto& s : steps) {
    for (NodeId t : s.attached) edges.push_back({s.hub, t});
  }
  return Graph::from_edges(node_count, edges);
}

HavelHakimiResult havel_hakimi(std::span<const int> targets, bool record_trace) {
  check_targets(targets);
  const std::size_t n = targets.size();
  RemainingDegreeQueue queue(targets);
  std::vector<std::vector<NodeId>> adjacency(n);
  HavelHakimiResult result;
  std::vector<NodeId> chosen;

  while (!queue.empty()) {
    const NodeId hub = queue.top();
    const int need = queue.remaining(hub);
    queue.remove(hub);
    chosen.clear();
    // Hubs leave the queue once satisfied, so queued nodes are never already
    // adjacent to `hub`.
    queue.for_each_descending([&](NodeId v) {
      chosen.push_back(v);
      return static_cast<int>(chosen.size()) < need;
    });
    if (static_cast<int>(chosen.size()) < need) {
      result.stuck_node = hub;
      return result;
    }
    for (NodeId t : chosen) {
      adjacency[hub].push_back(t);
      adjacency[t].push_back(hub);
      queue.decrement(t);
    }
    // remove() leaves the hub's counter in place; zero it for the snapshot.
    for (int i = 0; i < need; ++i) queue.decrement(hub);
    if (record_trace) {
      result.trace.steps.push_back({hub, chosen, fnv1a(queue.remaining()), false});
    }
  }
  result.graph = Graph::from_adjacency(adjacency);
  return result;
}

HavelHakimiResult havel_hakimi(const DegreeSequence& s, bool record_trace) {
  return havel_hakimi(s.values(), record_trace);
}

ImprovedHHResult improved_hh(std::span<const int> targets, const LinkProbabilityOracle& oracle,
                             bool record_trace) {
  check_targets(targets);
  if (!is_graphic(targets)) throw ContractViolation("improved_hh: target sequence is not graphic");
  const std::size_t n = targets.size();
  if (oracle.node_count() != n) throw ContractViolation("improved_hh: oracle size differs from sequence length");

  RemainingDegreeQueue queue(targets);
  std::vector<std::vector<NodeId>> adjacency(n);
  std::vector<double> probs(n);
  std::vector<NodeId> candidates;
  std::vector<char> is_adjacent(n, 0);
  ImprovedHHResult result;

  while (!queue.empty()) {
    const NodeId hub = queue.top();
    const int need = queue.remaining(hub);
    queue.remove(hub);

    oracle.row(hub, probs);
    for (NodeId v : adjacency[hub]) is_adjacent[v] = 1;
    candidates.clear();
    for (std::size_t v = 0; v < n; ++v) {
      const auto node = static_cast<NodeId>(v);
      if (node != hub && !is_adjacent[v] && queue.remaining(node) > 0 && queue.contains(node)) {
        candidates.push_back(node);
      }
    }
    for (NodeId v : adjacency[hub]) is_adjacent[v] = 0;

    auto better = [&](NodeId a, NodeId b) {
      if (probs[a] != probs[b]) return probs[a] > probs[b];
      const int ra = queue.remaining(a), rb = queue.remaining(b);
      if (ra != rb) return ra > rb;
      return a < b;
    };
    const std::size_t take = std::min(candidates.size(), static_cast<std::size_t>(need));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), better);
    candidates.resize(take);

    for (NodeId t : candidates) {
      adjacency[hub].push_back(t);
      adjacency[t].push_back(hub);
      queue.decrement(t);
    }
    for (std::size_t i = 0; i < take; ++i) queue.decrement(hub);
    const bool skipped = static_cast<int>(take) < need;
    if (skipped) result.skipped_hubs.push_back(hub);
    if (record_trace) {
      result.trace.steps.push_back({hub, candidates, fnv1a(queue.remaining()), skipped});
    }
  }

  result.graph = Graph::from_adjacency(adjacency);
  for (std::size_t v = 0; v < n; ++v) {
    result.stub_deficit += targets[v] - static_cast<long long>(result.graph.degree(static_cast<NodeId>(v)));
  }
  return result;
}

Graph initial_graph_from_oracle(const LinkProbabilityOracle& oracle, std::size_t target_edges) {
  const std::size_t n = oracle.node_count();
  const std::size_t pairs = n * (n > 0 ? n - 1 : 0) / 2;
  if (target_edges > pairs) throw ContractViolation("initial graph: target_edges exceeds C(n,2)");
  struct Scored {
    double p;
    NodeId u, v;
  };
  std::vector<Scored> scored;
  scored.reserve(pairs);
  std::vector<double> row(n);
  for (std::size_t u = 0; u < n; ++u) {
    oracle.row(static_cast<NodeId>(u), row);
    for (std::size_t v = u + 1; v < n; ++v) {
      scored.push_back({row[v], static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
  }
  auto before = [](const Scored& a, const Scored& b) {
    if (a.p != b.p) return a.p > b.p;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  };
  if (target_edges < scored.size()) {
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(target_edges),
                     scored.end(), before);
  }
  std::vector<Edge> edges;
  edges.reserve(target_edges);
  for (std::size_t i = 0; i < target_edges; ++i) edges.push_back({scored[i].u, scored[i].v});
  return Graph::from_edges(n, edges);
}

namespace {

std::vector<NodeId> rank_by_degree(std::span<const int> degrees) {
  std::vector<NodeId> order(degrees.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return degrees[a] > degrees[b]; });
  return order;
}

}  // namespace

DegreeAssignment assign_degree_sequence(const Graph& initial, std::span<const int> original_degrees) {
  if (initial.node_count() != original_degrees.size()) {
    throw ContractViolation("assign_degree_sequence: initial graph has " +
                            std::to_string(initial.node_count()) + " nodes but sequence has " +
                            std::to_string(original_degrees.size()));
  }
  const auto initial_degrees = initial.degrees();
  const auto new_order = rank_by_degree(initial_degrees);
  const auto original_order = rank_by_degree(original_degrees);
  DegreeAssignment out;
  out.targets.resize(new_order.size());
  out.correspondence.mapping.resize(new_order.size());
  for (std::size_t rank = 0; rank < new_order.size(); ++rank) {
    out.targets[new_order[rank]] = original_degrees[original_order[rank]];
    out.correspondence.mapping[new_order[rank]] = original_order[rank];
  }
  return out;
}

DegreeAssignment assign_degree_sequence(const Graph& initial, const DegreeSequence& s) {
  return assign_degree_sequence(initial, s.values());
}

}  // namespace doppel
