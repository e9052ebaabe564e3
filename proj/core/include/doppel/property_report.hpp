#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "doppel/graph.hpp"

namespace doppel {

/// Global property names in report order.
inline constexpr const char* kGlobalMetricNames[] = {
    "clustering_coefficient", "characteristic_path_length", "triangle_count",
    "square_count",           "lcc",                        "powerlaw_exponent",
    "wedge_count",            "rel_edge_distr_entropy",     "gini_coefficient",
};

/// MMD entries, present only when a reference graph is supplied.
inline constexpr const char* kDistributionMetricNames[] = {
    "local_clustering_mmd",
    "degree_distribution_mmd",
    "local_square_clustering_mmd",
};

struct MetricEntry {
  std::string name;
  double value = 0.0;
  /// False when the metric is undefined for this graph; `note` says why.
  bool defined = true;
  std::string note;
};

struct PropertyReport {
  std::string graph_id;
  std::string reference_id;
  std::optional<std::uint64_t> seed;
  std::vector<MetricEntry> entries;

  const MetricEntry* find(const std::string& name) const;
  /// Value of `name`; throws std::out_of_range when absent.
  double at(const std::string& name) const;

  /// Flat JSON object: metadata keys plus one numeric key per metric
  /// (undefined metrics serialize as null with a "<name>_note" key).
  std::string to_json() const;
  static PropertyReport from_json(const std::string& text);
};

/// All nine global metrics of `g`, plus the three distribution MMDs against
/// `reference` when given. Degenerate metrics are flagged, never thrown.
PropertyReport property_report(const Graph& g, const Graph* reference = nullptr);

/// Aligned-column text table: one row per report, one column per metric.
std::string format_report_table(const std::vector<PropertyReport>& rows);

/// Mean and sample standard deviation of each metric over repeated reports,
/// printed as "mean(±sd)" in the Table-1 style.
struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t samples = 0;
};
std::vector<MetricSummary> summarize_reports(const std::vector<PropertyReport>& reports);
std::string format_summary_table(const std::vector<MetricSummary>& summary);

}  // namespace doppel
