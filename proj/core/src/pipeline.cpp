#include "doppel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "doppel/edge_list.hpp"
#include "doppel/realization.hpp"
#include "doppel/serialize.hpp"

namespace doppel {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kGraphFile = "graph.edgelist";
constexpr const char* kNodeIdsFile = "node_ids.tsv";
constexpr const char* kFeaturesFile = "features.tsv";
constexpr const char* kLabelsFile = "labels.tsv";
constexpr const char* kModelFile = "link_model.json";
constexpr const char* kEmbeddingsFile = "embeddings.tsv";
constexpr const char* kEmbedHistoryFile = "embed_history.csv";
constexpr const char* kGeneratorFile = "generator.json";
constexpr const char* kCriticFile = "critic.json";
constexpr const char* kGanDiagnosticsFile = "gan_diagnostics.csv";
constexpr const char* kGanCdfFile = "gan_distance_cdf.csv";
constexpr const char* kSampledFile = "sampled_embeddings.tsv";
constexpr const char* kSampledLabelsFile = "sampled_labels.tsv";
constexpr const char* kInitialFile = "initial.edgelist";
constexpr const char* kAssignmentFile = "assignment.tsv";
constexpr const char* kOutputFile = "doppelganger.edgelist";
constexpr const char* kRealizationFile = "realization.json";
constexpr const char* kTraceFile = "trace.txt";
constexpr const char* kReportFile = "report.json";
constexpr const char* kManifestFile = "manifest.json";

Json path_json(const fs::path& p) { return p.empty() ? Json(nullptr) : Json(p.generic_string()); }

template <class T>
void read_key(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

fs::path read_path(const Json& obj, const char* key, const fs::path& fallback) {
  if (!obj.contains(key)) return fallback;
  if (obj.at(key).is_null()) return {};
  if (!obj.at(key).is_string()) throw ConfigError(std::string("config key '") + key + "' must be a path string");
  return obj.at(key).get<std::string>();
}

Json report_json(const PropertyReport& r) { return Json::parse(r.to_json()); }

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

EmbeddingMatrix load_embeddings(const fs::path& p) {
  auto in = open_in(p);
  return read_embeddings(in);
}

std::vector<int> load_labels(const fs::path& p) {
  auto in = open_in(p);
  const auto map = read_label_map(in);
  std::vector<int> labels(map.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = map.find(i);
    if (it == map.end()) throw FormatError(p.string() + ": missing label for node " + std::to_string(i));
    labels[i] = it->second;
  }
  return labels;
}

Graph load_graph(const fs::path& p) { return read_edge_list(p).graph; }

struct Assignment {
  std::vector<int> targets;
  NodeCorrespondence correspondence;
};

Assignment load_assignment(const fs::path& p) {
  auto in = open_in(p);
  Assignment a;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::size_t node = 0;
    int target = 0;
    NodeId original = 0;
    if (!(fields >> node >> target >> original) || node != a.targets.size()) {
      throw FormatError(p.string() + ": malformed assignment row");
    }
    a.targets.push_back(target);
    a.correspondence.mapping.push_back(original);
  }
  return a;
}

struct StageSpec {
  std::string name;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::function<void()> run;
};

std::map<std::string, std::string> digests(const std::vector<fs::path>& files, const fs::path& workdir) {
  std::map<std::string, std::string> out;
  for (const auto& f : files) {
    const std::string key = f.parent_path() == workdir ? f.filename().string() : f.generic_string();
    out[key] = fs::exists(f) ? file_digest(f) : std::string("missing");
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

StageSeeds PipelineConfig::stage_seeds() const {
  if (seeds) return *seeds;
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)};
}

void PipelineConfig::validate() const {
  if (graph.empty()) throw ConfigError("no input graph given");
  if (!fs::exists(graph)) throw ConfigError("input graph not found: " + graph.string());
  if (!features.empty() && !fs::exists(features)) throw ConfigError("features file not found: " + features.string());
  if (!labels.empty() && !fs::exists(labels)) throw ConfigError("labels file not found: " + labels.string());
  if (workdir.empty()) throw ConfigError("workdir must not be empty");
  if (embedding.hidden_width < 1 || embedding.embedding_dim < 1 || embedding.predictor_hidden < 1 ||
      embedding.adam.learning_rate <= 0.0) {
    throw ConfigError("embedding: widths and learning rate must be positive");
  }
  try {
    embedding.schedule.validate();
    gan.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig PipelineConfig::smoke() {
  PipelineConfig c;
  c.embedding.hidden_width = 32;
  c.embedding.embedding_dim = 16;
  c.embedding.predictor_hidden = 16;
  c.embedding.adam.learning_rate = 1e-2;
  c.embedding.schedule = {1, 3, 60, 20, 200};
  c.gan.generator_steps = 300;
  c.gan.diagnostic_interval = 100;
  c.gan.diagnostic_samples = 200;
  return c;
}

std::string PipelineConfig::to_json() const {
  Json j;
  j["graph"] = path_json(graph);
  j["features"] = path_json(features);
  j["labels"] = path_json(labels);
  j["workdir"] = path_json(workdir);
  j["seed"] = seed;
  if (seeds) j["seeds"] = {{"embed", seeds->embed}, {"gan", seeds->gan}, {"sample", seeds->sample}};
  j["trace"] = trace;
  const auto& e = embedding;
  j["embedding"] = {{"hidden_width", e.hidden_width},
                    {"embedding_dim", e.embedding_dim},
                    {"predictor_hidden", e.predictor_hidden},
                    {"leak", e.leak},
                    {"learning_rate", e.adam.learning_rate},
                    {"beta1", e.adam.beta1},
                    {"beta2", e.adam.beta2},
                    {"cycles", e.schedule.cycles},
                    {"rounds", e.schedule.rounds},
                    {"first_round_epochs", e.schedule.first_round_epochs},
                    {"later_round_epochs", e.schedule.later_round_epochs},
                    {"negatives_per_round", e.schedule.negatives_per_round}};
  j["gan"] = {{"latent_dim", gan.latent_dim},
              {"penalty", gan.penalty},
              {"critic_steps", gan.critic_steps},
              {"batch_size", gan.batch_size},
              {"generator_steps", gan.generator_steps},
              {"learning_rate", gan.adam.learning_rate},
              {"beta1", gan.adam.beta1},
              {"beta2", gan.adam.beta2},
              {"standardize", gan.standardize},
              {"diagnostic_interval", gan.diagnostic_interval},
              {"diagnostic_samples", gan.diagnostic_samples}};
  return j.dump(1) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text, const PipelineConfig& base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"graph", "features", "labels", "workdir", "seed", "seeds", "trace", "embedding", "gan"}, "config");
  PipelineConfig c = base;
  c.graph = read_path(j, "graph", c.graph);
  c.features = read_path(j, "features", c.features);
  c.labels = read_path(j, "labels", c.labels);
  c.workdir = read_path(j, "workdir", c.workdir);
  read_key(j, "seed", c.seed);
  read_key(j, "trace", c.trace);
  if (j.contains("seeds")) {
    const Json& s = j.at("seeds");
    reject_unknown(s, {"embed", "gan", "sample"}, "seeds");
    StageSeeds seeds = c.stage_seeds();
    read_key(s, "embed", seeds.embed);
    read_key(s, "gan", seeds.gan);
    read_key(s, "sample", seeds.sample);
    c.seeds = seeds;
  }
  if (j.contains("embedding")) {
    const Json& e = j.at("embedding");
    reject_unknown(e,
                   {"hidden_width", "embedding_dim", "predictor_hidden", "leak", "learning_rate", "beta1", "beta2",
                    "cycles", "rounds", "first_round_epochs", "later_round_epochs", "negatives_per_round"},
                   "embedding");
    auto& t = c.embedding;
    read_key(e, "hidden_width", t.hidden_width);
    read_key(e, "embedding_dim", t.embedding_dim);
    read_key(e, "predictor_hidden", t.predictor_hidden);
    read_key(e, "leak", t.leak);
    read_key(e, "learning_rate", t.adam.learning_rate);
    read_key(e, "beta1", t.adam.beta1);
    read_key(e, "beta2", t.adam.beta2);
    read_key(e, "cycles", t.schedule.cycles);
    read_key(e, "rounds", t.schedule.rounds);
    read_key(e, "first_round_epochs", t.schedule.first_round_epochs);
    read_key(e, "later_round_epochs", t.schedule.later_round_epochs);
    read_key(e, "negatives_per_round", t.schedule.negatives_per_round);
  }
  if (j.contains("gan")) {
    const Json& g = j.at("gan");
    reject_unknown(g,
                   {"latent_dim", "penalty", "critic_steps", "batch_size", "generator_steps", "learning_rate",
                    "beta1", "beta2", "standardize", "diagnostic_interval", "diagnostic_samples"},
                   "gan");
    auto& t = c.gan;
    read_key(g, "latent_dim", t.latent_dim);
    read_key(g, "penalty", t.penalty);
    read_key(g, "critic_steps", t.critic_steps);
    read_key(g, "batch_size", t.batch_size);
    read_key(g, "generator_steps", t.generator_steps);
    read_key(g, "learning_rate", t.adam.learning_rate);
    read_key(g, "beta1", t.adam.beta1);
    read_key(g, "beta2", t.adam.beta2);
    read_key(g, "standardize", t.standardize);
    read_key(g, "diagnostic_interval", t.diagnostic_interval);
    read_key(g, "diagnostic_samples", t.diagnostic_samples);
  }
  return c;
}

PipelineConfig PipelineConfig::from_json(const std::string& text) { return from_json(text, PipelineConfig{}); }

const StageRecord* RunManifest::find(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string RunManifest::to_json() const {
  Json j;
  j["config"] = config.empty() ? Json(nullptr) : Json::parse(config);
  j["stages"] = Json::array();
  for (const auto& s : stages) {
    Json r{{"name", s.name}, {"status", s.status}, {"inputs", s.inputs}, {"outputs", s.outputs},
           {"seconds", s.seconds}};
    if (!s.error.empty()) r["error"] = s.error;
    j["stages"].push_back(std::move(r));
  }
  j["failed_stage"] = failed_stage ? Json(*failed_stage) : Json(nullptr);
  return j.dump(1) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const Json j = Json::parse(text);
    if (!j.at("config").is_null()) m.config = j.at("config").dump(1) + "\n";
    for (const auto& r : j.at("stages")) {
      StageRecord s;
      s.name = r.at("name").get<std::string>();
      s.status = r.at("status").get<std::string>();
      s.inputs = r.at("inputs").get<std::map<std::string, std::string>>();
      s.outputs = r.at("outputs").get<std::map<std::string, std::string>>();
      s.seconds = r.at("seconds").get<double>();
      s.error = r.value("error", "");
      m.stages.push_back(std::move(s));
    }
    if (!j.at("failed_stage").is_null()) m.failed_stage = j.at("failed_stage").get<std::string>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> names{"ingest", "embed", "gan", "sample", "initial", "assign", "realize", "report"};
  return names;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, bool resume, std::ostream* log) {
  cfg.validate();
  const fs::path dir = cfg.workdir;
  fs::create_directories(dir);
  auto at = [&](const char* name) { return dir / name; };
  const StageSeeds seeds = cfg.stage_seeds();
  const bool has_labels = !cfg.labels.empty();
  const bool has_features = !cfg.features.empty();

  RunManifest previous;
  if (resume && fs::exists(at(kManifestFile))) {
    try {
      previous = RunManifest::from_json(read_text_file(at(kManifestFile)));
    } catch (const FormatError&) {
      previous = {};
    }
  }
  RunManifest manifest;
  manifest.config = cfg.to_json();
  const bool same_config = previous.config == manifest.config;

  std::vector<StageSpec> stages;

  // ingest: LCC of the input, compact ids, aligned side files.
  {
    std::vector<fs::path> in{cfg.graph};
    std::vector<fs::path> out{at(kGraphFile), at(kNodeIdsFile)};
    if (has_features) {
      in.push_back(cfg.features);
      out.push_back(at(kFeaturesFile));
    }
    if (has_labels) {
      in.push_back(cfg.labels);
      out.push_back(at(kLabelsFile));
    }
    stages.push_back({"ingest", in, out, [&] {
                        const IngestResult raw = read_edge_list(cfg.graph);
                        const InducedSubgraph lcc = largest_connected_component_with_ids(raw.graph);
                        std::vector<std::uint64_t> ids;
                        for (NodeId v : lcc.original_ids) ids.push_back(raw.original_ids[static_cast<std::size_t>(v)]);
                        write_edge_list(at(kGraphFile), lcc.graph);
                        {
                          auto os = open_out(at(kNodeIdsFile));
                          for (std::size_t i = 0; i < ids.size(); ++i) os << i << '\t' << ids[i] << '\n';
                        }
                        if (has_features) {
                          auto is = open_in(cfg.features);
                          const auto map = read_feature_map(is);
                          Matrix x(static_cast<Eigen::Index>(ids.size()), 0);
                          for (std::size_t i = 0; i < ids.size(); ++i) {
                            auto it = map.find(ids[i]);
                            if (it == map.end()) throw FormatError("no features for node " + std::to_string(ids[i]));
                            if (x.cols() == 0) x.resize(x.rows(), static_cast<Eigen::Index>(it->second.size()));
                            for (std::size_t k = 0; k < it->second.size(); ++k) {
                              x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = it->second[k];
                            }
                          }
                          auto os = open_out(at(kFeaturesFile));
                          write_embeddings(os, x);
                        }
                        if (has_labels) {
                          auto is = open_in(cfg.labels);
                          const auto map = read_label_map(is);
                          std::vector<int> aligned;
                          for (std::uint64_t id : ids) {
                            auto it = map.find(id);
                            if (it == map.end()) throw FormatError("no label for node " + std::to_string(id));
                            aligned.push_back(it->second);
                          }
                          auto os = open_out(at(kLabelsFile));
                          write_labels(os, aligned);
                        }
                      }});
  }

  {
    std::vector<fs::path> in{at(kGraphFile)};
    if (has_features) in.push_back(at(kFeaturesFile));
    stages.push_back({"embed", in, {at(kModelFile), at(kEmbeddingsFile), at(kEmbedHistoryFile)}, [&] {
                        const Graph g = load_graph(at(kGraphFile));
                        std::optional<Matrix> features;
                        if (has_features) features = load_embeddings(at(kFeaturesFile));
                        EmbeddingConfig ec = cfg.embedding;
                        ec.seed = seeds.embed;
                        TrainedEmbedding t = train_embedding(g, features, ec);
                        write_text_file(at(kModelFile), link_model_to_json(t.model, seeds.embed));
                        {
                          auto os = open_out(at(kEmbeddingsFile));
                          write_embeddings(os, t.embeddings, seeds.embed);
                        }
                        auto os = open_out(at(kEmbedHistoryFile));
                        os << "cycle,round,positives,negatives,loss\n";
                        char buf[64];
                        for (const auto& r : t.history) {
                          std::snprintf(buf, sizeof buf, "%.17g", r.loss);
                          os << r.cycle + 1 << ',' << r.round + 1 << ',' << r.positives << ',' << r.negatives << ','
                             << buf << '\n';
                        }
                      }});
  }

  {
    std::vector<fs::path> in{at(kEmbeddingsFile)};
    if (has_labels) in.push_back(at(kLabelsFile));
    stages.push_back({"gan", in, {at(kGeneratorFile), at(kCriticFile), at(kGanDiagnosticsFile), at(kGanCdfFile)}, [&] {
                        const EmbeddingMatrix emb = load_embeddings(at(kEmbeddingsFile));
                        std::optional<std::vector<int>> labels;
                        if (has_labels) labels = load_labels(at(kLabelsFile));
                        GanConfig gc = cfg.gan;
                        gc.seed = seeds.gan;
                        TrainedGan t = train_gan(emb, labels, gc);
                        write_text_file(at(kGeneratorFile), generator_to_json(t.generator, seeds.gan));
                        write_text_file(at(kCriticFile), critic_to_json(t.critic, seeds.gan));
                        char buf[128];
                        {
                          auto os = open_out(at(kGanDiagnosticsFile));
                          os << "step,critic_loss,generator_loss,mmd\n";
                          for (const auto& d : t.history) {
                            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", d.step, d.critic_loss,
                                          d.generator_loss, d.mmd);
                            os << buf;
                          }
                        }
                        // Pairwise-distance CDFs of (a subsample of) real and generated rows.
                        const Eigen::Index m = std::min<Eigen::Index>(emb.rows(), 1000);
                        const Matrix real = emb.topRows(m);
                        const Matrix fake = sample_embeddings(t.generator, static_cast<std::size_t>(m),
                                                              derive_seed(seeds.gan, 0xCDF)).embeddings;
                        const std::vector<double> dr = pairwise_distances(real);
                        const std::vector<double> df = pairwise_distances(fake);
                        const double top = std::max(dr.empty() ? 0.0 : dr.back(), df.empty() ? 0.0 : df.back());
                        std::vector<double> grid(101);
                        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = top * static_cast<double>(i) / 100.0;
                        const auto cr = pairwise_distance_cdf(real, grid);
                        const auto cf = pairwise_distance_cdf(fake, grid);
                        auto os = open_out(at(kGanCdfFile));
                        os << "distance,cdf_real,cdf_fake\n";
                        for (std::size_t i = 0; i < grid.size(); ++i) {
                          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid[i], cr[i], cf[i]);
                          os << buf;
                        }
                      }});
  }

  {
    std::vector<fs::path> out{at(kSampledFile)};
    if (has_labels) out.push_back(at(kSampledLabelsFile));
    stages.push_back({"sample", {at(kGeneratorFile), at(kGraphFile)}, out, [&] {
                        const Graph g = load_graph(at(kGraphFile));
                        const GeneratorParams gen = generator_from_json(read_text_file(at(kGeneratorFile)));
                        const GeneratedSample s = sample_embeddings(gen, g.node_count(), seeds.sample);
                        {
                          auto os = open_out(at(kSampledFile));
                          write_embeddings(os, s.embeddings, seeds.sample);
                        }
                        if (has_labels) {
                          auto os = open_out(at(kSampledLabelsFile));
                          write_labels(os, s.labels.value_or(std::vector<int>(g.node_count(), 0)), seeds.sample);
                        }
                      }});
  }

  stages.push_back({"initial", {at(kSampledFile), at(kModelFile), at(kGraphFile)}, {at(kInitialFile)}, [&] {
                      const Graph g = load_graph(at(kGraphFile));
                      const LinkModel model = link_model_from_json(read_text_file(at(kModelFile)));
                      const EmbeddingMatrix emb = load_embeddings(at(kSampledFile));
                      const Graph initial = initial_graph_from_predictor(emb, model.predictor, g.edge_count());
                      write_edge_list(at(kInitialFile), initial, seeds.sample);
                    }});

  stages.push_back({"assign", {at(kInitialFile), at(kGraphFile)}, {at(kAssignmentFile)}, [&] {
                      const Graph g = load_graph(at(kGraphFile));
                      const Graph initial = load_graph(at(kInitialFile));
                      const DegreeAssignment a = assign_degree_sequence(initial, g.degrees());
                      auto os = open_out(at(kAssignmentFile));
                      os << "# node\ttarget\toriginal\n";
                      for (std::size_t i = 0; i < a.targets.size(); ++i) {
                        os << i << '\t' << a.targets[i] << '\t' << a.correspondence.mapping[i] << '\n';
                      }
                    }});

  {
    std::vector<fs::path> out{at(kOutputFile), at(kRealizationFile)};
    if (cfg.trace) out.push_back(at(kTraceFile));
    stages.push_back({"realize", {at(kAssignmentFile), at(kSampledFile), at(kModelFile)}, out, [&] {
                        const Assignment a = load_assignment(at(kAssignmentFile));
                        const LinkModel model = link_model_from_json(read_text_file(at(kModelFile)));
                        const EmbeddingMatrix emb = load_embeddings(at(kSampledFile));
                        const PredictorOracle oracle(model.predictor, emb);
                        const ImprovedHHResult r = improved_hh(a.targets, oracle, cfg.trace);
                        write_edge_list(at(kOutputFile), r.graph, seeds.sample);
                        Json j{{"seed", seeds.sample}, {"stub_deficit", r.stub_deficit}, {"skipped_hubs", r.skipped_hubs}};
                        write_text_file(at(kRealizationFile), j.dump(1) + "\n");
                        if (cfg.trace) write_text_file(at(kTraceFile), r.trace.to_text());
                      }});
  }

  stages.push_back({"report", {at(kOutputFile), at(kGraphFile), at(kAssignmentFile), at(kRealizationFile)},
                    {at(kReportFile)}, [&] {
                      const Graph g0 = load_graph(at(kGraphFile));
                      const Graph g = load_graph(at(kOutputFile));
                      const Assignment a = load_assignment(at(kAssignmentFile));
                      const Json realization = Json::parse(read_text_file(at(kRealizationFile)));
                      PropertyReport original = property_report(g0);
                      original.graph_id = kGraphFile;
                      PropertyReport generated = property_report(g, &g0);
                      generated.graph_id = kOutputFile;
                      generated.reference_id = kGraphFile;
                      generated.seed = seeds.sample;
                      Json j;
                      j["seed"] = seeds.sample;
                      j["original"] = report_json(original);
                      j["generated"] = report_json(generated);
                      j["edge_overlap"] = edge_overlap(g, g0, a.correspondence);
                      j["correspondence"] = "degree-rank";
                      j["stub_deficit"] = realization.at("stub_deficit");
                      write_text_file(at(kReportFile), j.dump(1) + "\n");
                    }});

  PipelineResult result;
  bool upstream_rerun = false;
  for (const StageSpec& stage : stages) {
    const StageRecord* prior = previous.find(stage.name);
    if (resume && same_config && !upstream_rerun && prior && prior->status == "done" &&
        prior->inputs == digests(stage.inputs, dir) && prior->outputs == digests(stage.outputs, dir)) {
      manifest.stages.push_back(*prior);
      result.skipped_stages.push_back(stage.name);
      if (log) *log << "[" << stage.name << "] up to date\n";
      continue;
    }
    upstream_rerun = true;
    if (log) *log << "[" << stage.name << "] running\n" << std::flush;
    StageRecord rec;
    rec.name = stage.name;
    rec.inputs = digests(stage.inputs, dir);
    const auto start = std::chrono::steady_clock::now();
    try {
      stage.run();
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.seconds = seconds_since(start);
      rec.error = e.what();
      manifest.stages.push_back(rec);
      manifest.failed_stage = stage.name;
      write_text_file(at(kManifestFile), manifest.to_json());
      throw StageFailure(stage.name, e.what());
    }
    rec.status = "done";
    rec.seconds = seconds_since(start);
    rec.outputs = digests(stage.outputs, dir);
    manifest.stages.push_back(rec);
    write_text_file(at(kManifestFile), manifest.to_json());
    if (log) *log << "[" << stage.name << "] done in " << rec.seconds << " s\n";
  }
  write_text_file(at(kManifestFile), manifest.to_json());

  const Json report = Json::parse(read_text_file(at(kReportFile)));
  result.original = load_graph(at(kGraphFile));
  result.graph = load_graph(at(kOutputFile));
  result.correspondence = load_assignment(at(kAssignmentFile)).correspondence;
  result.original_report = PropertyReport::from_json(report.at("original").dump());
  result.report = PropertyReport::from_json(report.at("generated").dump());
  result.edge_overlap = report.at("edge_overlap").get<double>();
  result.stub_deficit = report.at("stub_deficit").get<long long>();
  result.manifest = std::move(manifest);
  return result;
}

double report_distance(const PropertyReport& candidate, const PropertyReport& reference) {
  double total = 0.0;
  for (const char* name : kGlobalMetricNames) {
    const MetricEntry* a = candidate.find(name);
    const MetricEntry* b = reference.find(name);
    const bool da = a && a->defined;
    const bool db = b && b->defined;
    if (!da && !db) continue;
    if (da != db) {
      total += 1.0;
      continue;
    }
    total += std::fabs(a->value - b->value) / std::max(std::fabs(b->value), 1e-12);
  }
  return total;
}

std::vector<RankedTrial> run_repeated(const PipelineConfig& cfg, int repeat, bool resume, std::ostream* log) {
  if (repeat < 1) throw ConfigError("--repeat must be at least 1");
  std::vector<RankedTrial> trials;
  for (int k = 0; k < repeat; ++k) {
    PipelineConfig trial = cfg;
    trial.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
    trial.seeds.reset();
    trial.workdir = cfg.workdir / ("trial-" + std::to_string(k));
    if (log) *log << "trial " << k << " seed " << trial.seed << "\n";
    const PipelineResult r = run_pipeline(trial, resume, log);
    trials.push_back({k, trial.seed, report_distance(r.report, r.original_report), trial.workdir});
  }
  std::stable_sort(trials.begin(), trials.end(),
                   [](const RankedTrial& a, const RankedTrial& b) { return a.distance < b.distance; });
  Json j = Json::array();
  for (const auto& t : trials) {
    j.push_back({{"trial", t.trial}, {"seed", t.seed}, {"distance", t.distance}, {"workdir", t.workdir.generic_string()}});
  }
  write_text_file(cfg.workdir / "ranking.json", j.dump(1) + "\n");
  return trials;
}

}  // namespace doppel
