#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doppel/embedding.hpp"
#include "doppel/gan.hpp"
#include "doppel/graph.hpp"
#include "doppel/property_report.hpp"

namespace doppel {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageSeeds {
  std::uint64_t embed = 0;
  std::uint64_t gan = 0;
  std::uint64_t sample = 0;
};

struct PipelineConfig {
  std::filesystem::path graph;
  std::filesystem::path features;  // optional, empty when unused
  std::filesystem::path labels;    // optional, empty when unused
  std::filesystem::path workdir = "doppel-run";
  std::uint64_t seed = 0;
  /// Explicit per-stage seeds; derived from `seed` when absent.
  std::optional<StageSeeds> seeds;
  bool trace = false;
  EmbeddingConfig embedding{};
  GanConfig gan{};

  StageSeeds stage_seeds() const;
  /// Throws ConfigError for missing inputs or invalid numeric settings.
  void validate() const;

  /// Reduced epochs and steps for quick end-to-end runs.
  static PipelineConfig smoke();

  std::string to_json() const;
  /// Overlays the keys present in `text` onto `base`; unknown keys are errors.
  static PipelineConfig from_json(const std::string& text, const PipelineConfig& base);
  static PipelineConfig from_json(const std::string& text);
};

struct StageRecord {
  std::string name;
  std::string status;  // "done" or "failed"
  std::map<std::string, std::string> inputs;   // file -> digest
  std::map<std::string, std::string> outputs;  // file -> digest
  double seconds = 0.0;
  std::string error;
};

struct RunManifest {
  std::string config;  // snapshot, as PipelineConfig::to_json
  std::vector<StageRecord> stages;
  std::optional<std::string> failed_stage;

  const StageRecord* find(const std::string& name) const;
  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Stage names in execution order.
const std::vector<std::string>& pipeline_stages();

struct PipelineResult {
  Graph original;
  Graph graph;
  NodeCorrespondence correspondence;
  PropertyReport original_report;
  PropertyReport report;
  double edge_overlap = 0.0;
  long long stub_deficit = 0;
  std::vector<std::string> skipped_stages;
  RunManifest manifest;
};

/// ingest + LCC → embeddings → GAN → sample → initial graph → degree
/// assignment → improved HH → report. Artifacts and manifest.json go to
/// cfg.workdir; a stage whose recorded input and output digests still match
/// is not rerun when `resume` is set. Throws StageFailure after recording the
/// failed stage in the manifest.
PipelineResult run_pipeline(const PipelineConfig& cfg, bool resume = true, std::ostream* log = nullptr);

/// Σ over the global metrics of |x − x₀| / max(|x₀|, 1e-12); a metric
/// defined on one side only contributes 1.
double report_distance(const PropertyReport& candidate, const PropertyReport& reference);

struct RankedTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  double distance = 0.0;
  std::filesystem::path workdir;
};

/// Runs `repeat` trials in workdir/trial-k with seeds derived from cfg.seed
/// and returns them sorted by report_distance to the original graph. The
/// ranking is also written to workdir/ranking.json.
std::vector<RankedTrial> run_repeated(const PipelineConfig& cfg, int repeat, bool resume = true,
                                      std::ostream* log = nullptr);

}  // namespace doppel
