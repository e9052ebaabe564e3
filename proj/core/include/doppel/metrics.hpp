#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doppel/graph.hpp"

namespace doppel {

/// Thrown by metrics whose value is undefined for the given graph (for
/// instance entropy of an edgeless graph).
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A real-valued statistic that may be undefined for degenerate graphs.
/// `defined == false` carries the sentinel value documented per metric.
struct FlaggedValue {
  double value = 0.0;
  bool defined = true;
};

/// Per-node statistic; order is irrelevant to every consumer.
struct NodeStatisticDistribution {
  std::vector<double> values;
};

/// Pairwise (cascade) summation; deterministic for a given input order.
double pairwise_sum(std::span<const double> values);

// Subgraph counts ----------------------------------------------------------

std::uint64_t triangle_count(const Graph& g);

/// Number of 4-cliques.
std::uint64_t square_count(const Graph& g);

/// Σ_v C(d(v), 2): two-hop paths.
std::uint64_t wedge_count(const Graph& g);

/// Σ_v C(d(v), 3): 3-stars.
std::uint64_t claw_count(const Graph& g);

/// Triangles through each node.
std::vector<std::uint64_t> triangles_per_node(const Graph& g);

// Global properties --------------------------------------------------------

/// 3·triangles / claws. Zero claws gives {0, undefined}.
FlaggedValue global_clustering_coefficient(const Graph& g);

/// 3·triangles / wedges (closed over all connected triplets).
FlaggedValue transitivity(const Graph& g);

/// Median over nodes of the mean BFS distance to reachable nodes. Isolated
/// nodes contribute 0; an even count averages the two middle means.
double characteristic_path_length(const Graph& g);

std::size_t lcc_size(const Graph& g);

/// 1 + n / Σ log(d/d_min) over positive-degree nodes. Regular graphs give
/// {+inf, undefined}.
FlaggedValue powerlaw_exponent(const Graph& g);
FlaggedValue powerlaw_exponent(std::span<const int> degrees);

/// (1/log n) Σ_v −(d/2|E|) log(d/2|E|). Throws MetricError when |E| = 0.
double relative_edge_distribution_entropy(const Graph& g);

/// Gini coefficient of the degrees sorted ascending with 1-based ranks.
/// Throws MetricError when |E| = 0.
double gini_coefficient(const Graph& g);

// Local distributions ------------------------------------------------------

NodeStatisticDistribution local_clustering_distribution(const Graph& g);
NodeStatisticDistribution local_square_clustering_distribution(const Graph& g);
NodeStatisticDistribution degree_distribution(const Graph& g);

/// Median of |a_i - a_j| over all unordered pairs of the sample.
double median_pairwise_abs_difference(std::span<const double> sample);

/// Biased squared MMD with a Gaussian kernel; bandwidth is the median
/// pairwise absolute difference of the pooled sample, floored at 1e-8.
/// Throws MetricError on empty input.
double mmd(const NodeStatisticDistribution& a, const NodeStatisticDistribution& b);

}  // namespace doppel
