#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace doppel {

using NodeId = std::int32_t;

/// Raised when a caller breaks a documented precondition (size mismatch,
/// non-bijective correspondence, out-of-range id).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Counts of records discarded while building a simple graph.
struct BuildStats {
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;

  std::size_t dropped() const { return self_loops + duplicates; }
};

/// Immutable undirected simple graph in compressed sparse row form.
///
/// Nodes are 0..node_count()-1 and every adjacency list is strictly
/// increasing. Instances are only produced by from_edges(), which enforces
/// symmetry and drops self-loops and duplicate edges.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on `node_count` nodes. Self-loops and repeated edges
  /// (in either orientation) are dropped and tallied in `stats` when given.
  /// Throws ContractViolation for endpoints outside [0, node_count).
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          BuildStats* stats = nullptr);

  /// Builds from per-node adjacency sets; lists need not be sorted but must
  /// be symmetric.
  static Graph from_adjacency(const std::vector<std::vector<NodeId>>& adjacency);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }
  bool empty() const { return node_count() == 0; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const;

  /// Every undirected edge once with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

  /// Per-node degrees in node order.
  std::vector<int> degrees() const;

  /// Graph with node `v` renamed to `perm[v]`; `perm` must be a permutation.
  Graph relabeled(std::span<const NodeId> perm) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Nonincreasing sequence of nonnegative degrees.
class DegreeSequence {
 public:
  DegreeSequence() = default;
  /// Sorts `degrees` nonincreasing. Negative entries are kept (and make the
  /// sequence non-graphic) so that callers can probe arbitrary input.
  explicit DegreeSequence(std::vector<int> degrees);

  std::span<const int> values() const { return degrees_; }
  std::size_t size() const { return degrees_.size(); }
  int operator[](std::size_t i) const { return degrees_[i]; }
  long long sum() const;

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<int> degrees_;
};

/// mapping[new_node] = original_node.
struct NodeCorrespondence {
  std::vector<NodeId> mapping;

  static NodeCorrespondence identity(std::size_t n);
  bool is_bijection() const;
  std::size_t size() const { return mapping.size(); }
};

/// Subgraph induced on a node subset, with the ids it came from.
struct InducedSubgraph {
  Graph graph;
  std::vector<NodeId> original_ids;
};

InducedSubgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Component label per node; labels are assigned in order of the smallest
/// node id in each component, so component 0 contains node 0.
std::vector<NodeId> connected_components(const Graph& g, std::size_t* count = nullptr);

/// Induced subgraph on the largest component. Ties go to the component whose
/// smallest node id is lowest; ids are recompacted in ascending order.
InducedSubgraph largest_connected_component_with_ids(const Graph& g);
Graph largest_connected_component(const Graph& g);

DegreeSequence degree_sequence(const Graph& g);

/// Erdős–Gallai test. Independent of the realization algorithms.
bool is_graphic(std::span<const int> degrees);
inline bool is_graphic(const DegreeSequence& s) { return is_graphic(s.values()); }

/// Fraction of g0's edges reproduced by g under `corr` (new -> original).
/// Returns 0 when g0 has no edges.
double edge_overlap(const Graph& g, const Graph& g0, const NodeCorrespondence& corr);

}  // namespace doppel
