#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "doppel/graph.hpp"

namespace doppel {

/// Symmetric, deterministic link probability between two nodes.
class LinkProbabilityOracle {
 public:
  virtual ~LinkProbabilityOracle() = default;

  virtual std::size_t node_count() const = 0;
  virtual double prob(NodeId i, NodeId j) const = 0;

  /// out[j] = prob(i, j) for every node j. Implementations with batched
  /// scoring override this.
  virtual void row(NodeId i, std::span<double> out) const;
};

class ConstantOracle final : public LinkProbabilityOracle {
 public:
  ConstantOracle(std::size_t n, double p) : n_(n), p_(p) {}
  std::size_t node_count() const override { return n_; }
  double prob(NodeId, NodeId) const override { return p_; }

 private:
  std::size_t n_;
  double p_;
};

/// Dense n×n table; only the upper triangle is consulted.
class MatrixOracle final : public LinkProbabilityOracle {
 public:
  MatrixOracle(std::size_t n, std::vector<double> row_major);
  std::size_t node_count() const override { return n_; }
  double prob(NodeId i, NodeId j) const override {
    return i < j ? p_[static_cast<std::size_t>(i) * n_ + j] : p_[static_cast<std::size_t>(j) * n_ + i];
  }

 private:
  std::size_t n_;
  std::vector<double> p_;
};

class FunctionOracle final : public LinkProbabilityOracle {
 public:
  using Fn = std::function<double(NodeId, NodeId)>;
  FunctionOracle(std::size_t n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  std::size_t node_count() const override { return n_; }
  /// Evaluated with (min, max) so asymmetric callables still give a symmetric oracle.
  double prob(NodeId i, NodeId j) const override { return i < j ? fn_(i, j) : fn_(j, i); }

 private:
  std::size_t n_;
  Fn fn_;
};

/// Max-priority structure over remaining degrees: buckets indexed by
/// remaining degree, each ordered by node id. Nodes at zero are dropped.
class RemainingDegreeQueue {
 public:
  explicit RemainingDegreeQueue(std::span<const int> remaining);

  bool empty() const { return top_ < 1; }
  /// Node with the largest remaining degree, lowest id among ties.
  NodeId top() const;
  int remaining(NodeId v) const { return remaining_[v]; }
  std::span<const int> remaining() const { return remaining_; }

  void decrement(NodeId v);
  /// Takes `v` out of the queue; its remaining degree is left untouched.
  void remove(NodeId v);
  bool contains(NodeId v) const { return queued_[v] != 0; }

  /// Visits queued nodes by remaining degree descending, id ascending, until
  /// `visit` returns false.
  template <typename Visit>
  void for_each_descending(Visit&& visit) const {
    for (int d = top_; d >= 1; --d) {
      for (NodeId v : buckets_[d]) {
        if (!visit(v)) return;
      }
    }
  }

 private:
  void settle_top();

  std::vector<std::set<NodeId>> buckets_;
  std::vector<int> remaining_;
  std::vector<char> queued_;
  int top_ = 0;
};

struct RealizationStep {
  NodeId hub = -1;
  std::vector<NodeId> attached;
  /// FNV-1a hash of the remaining-degree vector after the step.
  std::uint64_t remaining_hash = 0;
  bool skipped = false;
};

/// Step-by-step record of a realization run.
struct RealizationTrace {
  std::vector<RealizationStep> steps;

  /// One line per step: "step <i> hub <k> attached <a,b,...> rd <hash>[ skipped]".
  std::string to_text() const;
  /// Rebuilds the realized graph from the recorded attachments.
  Graph replay(std::size_t node_count) const;
};

struct HavelHakimiResult {
  std::optional<Graph> graph;
  /// Hub that could not be satisfied when the sequence is not graphic.
  NodeId stuck_node = -1;
  RealizationTrace trace;

  bool ok() const { return graph.has_value(); }
};

/// Classic Havel–Hakimi. Node i receives target degree `targets[i]`.
HavelHakimiResult havel_hakimi(std::span<const int> targets, bool record_trace = false);
HavelHakimiResult havel_hakimi(const DegreeSequence& s, bool record_trace = false);

struct ImprovedHHResult {
  Graph graph;
  /// Σ (target - realized degree); zero when no hub was skipped.
  long long stub_deficit = 0;
  std::vector<NodeId> skipped_hubs;
  RealizationTrace trace;
};

/// Havel–Hakimi with neighbours chosen by link probability.
///
/// Hubs are taken by largest remaining degree (lowest id on ties). Each hub
/// attaches to the eligible nodes (not itself, not yet adjacent, remaining
/// degree > 0) in order of probability descending; equal probabilities
/// prefer larger remaining degree, then lower id. A hub that runs out of
/// candidates is skipped and its leftover stubs are reported as deficit.
/// Throws ContractViolation when `targets` is not graphic.
ImprovedHHResult improved_hh(std::span<const int> targets, const LinkProbabilityOracle& oracle,
                             bool record_trace = false);

/// Keeps the `target_edges` highest-probability pairs; ties at the cutoff
/// go to the lexicographically smaller pair.
Graph initial_graph_from_oracle(const LinkProbabilityOracle& oracle, std::size_t target_edges);

struct DegreeAssignment {
  /// targets[new_node] = degree to realize.
  std::vector<int> targets;
  /// mapping[new_node] = original node of equal degree rank.
  NodeCorrespondence correspondence;
};

/// Ranks the new nodes by degree in `initial` (descending, ties by id) and
/// hands the i-th of them the i-th largest original degree. The matching
/// original node is the one of rank i in the original order (descending
/// degree, ties by id).
DegreeAssignment assign_degree_sequence(const Graph& initial, std::span<const int> original_degrees);
/// Same, for a bare sorted sequence: original node i is taken to hold rank i.
DegreeAssignment assign_degree_sequence(const Graph& initial, const DegreeSequence& s);

}  // namespace doppel
