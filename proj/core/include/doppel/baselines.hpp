#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "doppel/graph.hpp"

namespace doppel {

/// G(n, p): every pair independently with probability p.
Graph er_graph(std::size_t n, double p, std::uint64_t seed);

/// Preferential attachment. Starts from m isolated nodes; the first arrival
/// links to all of them, later arrivals pick m distinct targets from the urn
/// of edge endpoints.
Graph ba_graph(std::size_t n, int m, std::uint64_t seed);

/// Pair (i, j) independently with probability min(d_i d_j / Σd, 1).
Graph chung_lu(std::span<const int> degrees, std::uint64_t seed);
Graph chung_lu(const DegreeSequence& s, std::uint64_t seed);

struct ConfModelResult {
  std::optional<Graph> graph;  // empty when every retry failed
  int attempts = 0;
  std::size_t kept_edges = 0;
};

/// Keeps ⌈target_overlap · |E|⌉ random edges of g0 and pairs the remaining
/// stubs uniformly; a pairing with a loop, a multi-edge or a kept edge is
/// discarded and redrawn whole, at most `max_retries` times.
ConfModelResult conf_model(const Graph& g0, double target_overlap, int max_retries, std::uint64_t seed);

}  // namespace doppel
