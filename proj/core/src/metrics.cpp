#include "doppel/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace doppel {
namespace {

// Degree-ordered orientation: each edge points from lower to higher
// (degree, id) rank, so every clique is enumerated exactly once.
std::vector<std::vector<NodeId>> oriented_out_lists(const Graph& g) {
  const std::size_t n = g.node_count();
  auto before = [&](NodeId a, NodeId b) {
    const auto da = g.degree(a), db = g.degree(b);
    return da != db ? da < db : a < b;
  };
  std::vector<std::vector<NodeId>> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(static_cast<NodeId>(u))) {
      if (before(static_cast<NodeId>(u), v)) out[u].push_back(v);
    }
  }
  return out;
}

template <typename Out>
void intersect_into(std::span<const NodeId> a, std::span<const NodeId> b, Out out) {
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), out);
}

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<std::uint64_t> triangles_per_node(const Graph& g) {
  const auto out = oriented_out_lists(g);
  std::vector<std::uint64_t> per_node(g.node_count(), 0);
  std::vector<NodeId> common;
  for (std::size_t u = 0; u < out.size(); ++u) {
    for (NodeId v : out[u]) {
      common.clear();
      intersect_into(out[u], out[v], std::back_inserter(common));
      for (NodeId w : common) {
        ++per_node[u];
        ++per_node[v];
        ++per_node[w];
      }
    }
  }
  return per_node;
}

std::uint64_t triangle_count(const Graph& g) {
  const auto out = oriented_out_lists(g);
  std::uint64_t total = 0;
  for (std::size_t u = 0; u < out.size(); ++u) {
    for (NodeId v : out[u]) total += intersection_size(out[u], out[v]);
  }
  return total;
}

std::uint64_t square_count(const Graph& g) {
  const auto out = oriented_out_lists(g);
  std::uint64_t total = 0;
  std::vector<NodeId> common;
  for (std::size_t u = 0; u < out.size(); ++u) {
    for (NodeId v : out[u]) {
      common.clear();
      intersect_into(out[u], out[v], std::back_inserter(common));
      for (NodeId w : common) total += intersection_size(common, out[w]);
    }
  }
  return total;
}

std::uint64_t wedge_count(const Graph& g) {
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const std::uint64_t d = g.degree(static_cast<NodeId>(v));
    total += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  return total;
}

std::uint64_t claw_count(const Graph& g) {
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const std::uint64_t d = g.degree(static_cast<NodeId>(v));
    if (d >= 3) total += d * (d - 1) * (d - 2) / 6;
  }
  return total;
}

FlaggedValue global_clustering_coefficient(const Graph& g) {
  const std::uint64_t claws = claw_count(g);
  if (claws == 0) return {0.0, false};
  return {3.0 * static_cast<double>(triangle_count(g)) / static_cast<double>(claws), true};
}

FlaggedValue transitivity(const Graph& g) {
  const std::uint64_t wedges = wedge_count(g);
  if (wedges == 0) return {0.0, false};
  return {3.0 * static_cast<double>(triangle_count(g)) / static_cast<double>(wedges), true};
}

double characteristic_path_length(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n <= 1) return 0.0;
  std::vector<double> means(n, 0.0);
  std::vector<int> dist(n, -1);
  std::vector<NodeId> frontier;
  frontier.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    frontier.clear();
    frontier.push_back(static_cast<NodeId>(s));
    dist[s] = 0;
    std::uint64_t total = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId u = frontier[head];
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          total += static_cast<std::uint64_t>(dist[v]);
          frontier.push_back(v);
        }
      }
    }
    const std::size_t reached = frontier.size() - 1;
    means[s] = reached == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(reached);
  }
  return median_of(std::move(means));
}

std::size_t lcc_size(const Graph& g) {
  if (g.empty()) return 0;
  std::size_t count = 0;
  const auto label = connected_components(g, &count);
  std::vector<std::size_t> size(count, 0);
  for (NodeId l : label) ++size[l];
  return *std::max_element(size.begin(), size.end());
}

FlaggedValue powerlaw_exponent(const Graph& g) { return powerlaw_exponent(g.degrees()); }

FlaggedValue powerlaw_exponent(std::span<const int> degrees) {
  // Sorted so that any ordering of the same multiset sums identically.
  std::vector<int> positive;
  for (int d : degrees) {
    if (d > 0) positive.push_back(d);
  }
  std::sort(positive.begin(), positive.end());
  if (positive.empty()) return {std::numeric_limits<double>::infinity(), false};
  const int dmin = *std::min_element(positive.begin(), positive.end());
  std::vector<double> logs;
  logs.reserve(positive.size());
  for (int d : positive) logs.push_back(std::log(static_cast<double>(d) / dmin));
  const double denom = pairwise_sum(logs);
  if (denom <= 0.0) return {std::numeric_limits<double>::infinity(), false};
  return {1.0 + static_cast<double>(positive.size()) / denom, true};
}

double relative_edge_distribution_entropy(const Graph& g) {
  if (g.edge_count() == 0) throw MetricError("relative edge distribution entropy: graph has no edges");
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  std::vector<double> terms;
  terms.reserve(g.node_count());
  auto degrees = g.degrees();
  std::sort(degrees.begin(), degrees.end());
  for (int d : degrees) {
    if (d == 0) continue;
    const double p = d / two_m;
    terms.push_back(-p * std::log(p));
  }
  return pairwise_sum(terms) / std::log(static_cast<double>(g.node_count()));
}

double gini_coefficient(const Graph& g) {
  if (g.edge_count() == 0) throw MetricError("gini coefficient: graph has no edges");
  auto d = g.degrees();
  std::sort(d.begin(), d.end());
  const double n = static_cast<double>(d.size());
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    weighted += static_cast<double>(i + 1) * d[i];
    total += d[i];
  }
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

NodeStatisticDistribution local_clustering_distribution(const Graph& g) {
  const auto tri = triangles_per_node(g);
  NodeStatisticDistribution out;
  out.values.resize(g.node_count(), 0.0);
  for (std::size_t v = 0; v < out.values.size(); ++v) {
    const double d = static_cast<double>(g.degree(static_cast<NodeId>(v)));
    if (d >= 2) out.values[v] = static_cast<double>(tri[v]) / (d * (d - 1) / 2.0);
  }
  return out;
}

NodeStatisticDistribution local_square_clustering_distribution(const Graph& g) {
  NodeStatisticDistribution out;
  out.values.resize(g.node_count(), 0.0);
  for (std::size_t v = 0; v < out.values.size(); ++v) {
    const auto nb = g.neighbors(static_cast<NodeId>(v));
    if (nb.size() < 2) continue;
    double squares = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        const NodeId u = nb[i];
        const NodeId w = nb[j];
        // v is always a common neighbour of u and w; exclude it.
        const double q = static_cast<double>(intersection_size(g.neighbors(u), g.neighbors(w))) - 1.0;
        const double degm = q + 1.0 + (g.has_edge(u, w) ? 1.0 : 0.0);
        squares += q;
        potential += (static_cast<double>(g.degree(u)) - degm) +
                     (static_cast<double>(g.degree(w)) - degm) + q;
      }
    }
    if (potential > 0.0) out.values[v] = squares / potential;
  }
  return out;
}

NodeStatisticDistribution degree_distribution(const Graph& g) {
  NodeStatisticDistribution out;
  out.values.reserve(g.node_count());
  for (int d : g.degrees()) out.values.push_back(static_cast<double>(d));
  return out;
}

double median_pairwise_abs_difference(std::span<const double> sample) {
  std::vector<double> a(sample.begin(), sample.end());
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (pairs == 0) return 0.0;

  auto count_at_most = [&](double t) {
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (std::size_t j = 1; j < n; ++j) {
      while (a[j] - a[i] > t) ++i;
      count += j - i;
    }
    return count;
  };
  // k-th smallest difference (1-based): bisect on the bit pattern, which is
  // order-preserving for nonnegative doubles, so the result is exact.
  auto kth = [&](std::uint64_t k) {
    std::uint64_t lo = 0;
    std::uint64_t hi = std::bit_cast<std::uint64_t>(a.back() - a.front());
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (count_at_most(std::bit_cast<double>(mid)) >= k) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return std::bit_cast<double>(lo);
  };
  if (pairs % 2 == 1) return kth((pairs + 1) / 2);
  return 0.5 * (kth(pairs / 2) + kth(pairs / 2 + 1));
}

double mmd(const NodeStatisticDistribution& a, const NodeStatisticDistribution& b) {
  if (a.values.empty() || b.values.empty()) throw MetricError("mmd: empty distribution");
  std::vector<double> pooled(a.values);
  pooled.insert(pooled.end(), b.values.begin(), b.values.end());
  const double bandwidth = std::max(median_pairwise_abs_difference(pooled), 1e-8);
  const double scale = -1.0 / (2.0 * bandwidth * bandwidth);

  auto mean_kernel = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> rows(x.size());
    std::vector<double> row(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double diff = x[i] - y[j];
        row[j] = std::exp(scale * diff * diff);
      }
      rows[i] = pairwise_sum(row);
    }
    return pairwise_sum(rows) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  };
  // Sorted samples make equal multisets give exactly zero.
  std::vector<double> x(a.values);
  std::vector<double> y(b.values);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double value = mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y);
  return std::max(value, 0.0);
}

}  // namespace doppel
