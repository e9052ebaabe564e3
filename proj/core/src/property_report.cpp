#include "doppel/property_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "doppel/metrics.hpp"

namespace doppel {

const MetricEntry* PropertyReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

double PropertyReport::at(const std::string& name) const {
  const MetricEntry* e = find(name);
  if (!e) throw std::out_of_range("report has no metric '" + name + "'");
  return e->value;
}

std::string PropertyReport::to_json() const {
  nlohmann::ordered_json j;
  j["graph_id"] = graph_id;
  j["reference_id"] = reference_id;
  if (seed) {
    j["seed"] = *seed;
  } else {
    j["seed"] = nullptr;
  }
  for (const auto& e : entries) {
    if (e.defined && std::isfinite(e.value)) {
      j[e.name] = e.value;
    } else {
      j[e.name] = nullptr;
      j[e.name + "_note"] = e.note;
    }
  }
  return j.dump(2) + "\n";
}

PropertyReport PropertyReport::from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  PropertyReport r;
  r.graph_id = j.value("graph_id", "");
  r.reference_id = j.value("reference_id", "");
  if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "graph_id" || key == "reference_id" || key == "seed") continue;
    if (key.size() > 5 && key.ends_with("_note")) continue;
    MetricEntry e;
    e.name = key;
    if (it->is_null()) {
      e.defined = false;
      e.value = std::nan("");
      e.note = j.value(key + "_note", "");
    } else {
      e.value = it->get<double>();
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

PropertyReport property_report(const Graph& g, const Graph* reference) {
  PropertyReport r;
  auto add = [&](const char* name, double value, bool defined = true, std::string note = {}) {
    r.entries.push_back({name, value, defined, std::move(note)});
  };
  auto add_flagged = [&](const char* name, FlaggedValue v, const char* why) {
    add(name, v.value, v.defined, v.defined ? std::string() : std::string(why));
  };
  auto add_guarded = [&](const char* name, auto&& fn) {
    try {
      add(name, fn());
    } catch (const MetricError& err) {
      add(name, std::nan(""), false, err.what());
    }
  };

  add_flagged("clustering_coefficient", global_clustering_coefficient(g), "no 3-stars");
  add("characteristic_path_length", characteristic_path_length(g));
  add("triangle_count", static_cast<double>(triangle_count(g)));
  add("square_count", static_cast<double>(square_count(g)));
  add("lcc", static_cast<double>(lcc_size(g)));
  add_flagged("powerlaw_exponent", powerlaw_exponent(g), "all positive degrees equal");
  add("wedge_count", static_cast<double>(wedge_count(g)));
  add_guarded("rel_edge_distr_entropy", [&] { return relative_edge_distribution_entropy(g); });
  add_guarded("gini_coefficient", [&] { return gini_coefficient(g); });

  if (reference) {
    add_guarded("local_clustering_mmd", [&] {
      return mmd(local_clustering_distribution(g), local_clustering_distribution(*reference));
    });
    add_guarded("degree_distribution_mmd",
                [&] { return mmd(degree_distribution(g), degree_distribution(*reference)); });
    add_guarded("local_square_clustering_mmd", [&] {
      return mmd(local_square_clustering_distribution(g),
                 local_square_clustering_distribution(*reference));
    });
  }
  return r;
}

namespace {

std::string format_value(double v, bool defined) {
  if (!defined || !std::isfinite(v)) return "n/a";
  std::ostringstream os;
  if (v != 0.0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-3)) {
    os << std::scientific << std::setprecision(3) << v;
  } else {
    os << std::setprecision(6) << v;
  }
  return os.str();
}

std::string format_mean_sd(double mean, double sd) {
  if (!std::isfinite(mean)) return "n/a";
  int exponent = mean == 0.0 ? 0 : static_cast<int>(std::floor(std::log10(std::fabs(mean))));
  const double scale = std::pow(10.0, exponent);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.2f(±%.2f)e%+03d", mean / scale, sd / scale, exponent);
  return buf;
}

}  // namespace

std::string format_report_table(const std::vector<PropertyReport>& rows) {
  std::vector<std::string> columns;
  for (const auto& r : rows) {
    for (const auto& e : r.entries) {
      if (std::find(columns.begin(), columns.end(), e.name) == columns.end()) columns.push_back(e.name);
    }
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"graph"};
  header.insert(header.end(), columns.begin(), columns.end());
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.graph_id.empty() ? "-" : r.graph_id};
    for (const auto& c : columns) {
      const MetricEntry* e = r.find(c);
      line.push_back(e ? format_value(e->value, e->defined) : "");
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) os << "  ";
      os << std::left << std::setw(static_cast<int>(width[i])) << line[i];
    }
    os << '\n';
  }
  return os.str();
}

std::vector<MetricSummary> summarize_reports(const std::vector<PropertyReport>& reports) {
  std::vector<MetricSummary> out;
  std::map<std::string, std::vector<double>> samples;
  for (const auto& r : reports) {
    for (const auto& e : r.entries) {
      auto [it, inserted] = samples.try_emplace(e.name);
      if (inserted) out.push_back({e.name});
      if (e.defined && std::isfinite(e.value)) it->second.push_back(e.value);
    }
  }
  for (auto& s : out) {
    const auto& v = samples[s.name];
    s.samples = v.size();
    if (v.empty()) {
      s.mean = std::nan("");
      continue;
    }
    s.mean = pairwise_sum(v) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

std::string format_summary_table(const std::vector<MetricSummary>& summary) {
  std::size_t name_width = 6;
  for (const auto& s : summary) name_width = std::max(name_width, s.name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_width)) << "metric"
     << "  mean(±sd)            n\n";
  for (const auto& s : summary) {
    os << std::left << std::setw(static_cast<int>(name_width)) << s.name << "  "
       << std::setw(20) << format_mean_sd(s.mean, s.sd) << " " << s.samples << '\n';
  }
  return os.str();
}

}  // namespace doppel
