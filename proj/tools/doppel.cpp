// doppel: command-line front end for the doppelganger pipeline and its parts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doppel/baselines.hpp"
#include "doppel/edge_list.hpp"
#include "doppel/embedding.hpp"
#include "doppel/gan.hpp"
#include "doppel/pipeline.hpp"
#include "doppel/property_report.hpp"
#include "doppel/realization.hpp"
#include "doppel/serialize.hpp"

namespace fs = std::filesystem;
using namespace doppel;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitNonGraphic = 4;

struct NonGraphic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string workdir;
  int repeat = 1;
  std::string format = "table";
};

PipelineConfig load_config(const Globals& g, PipelineConfig base = {}) {
  PipelineConfig c = std::move(base);
  if (!g.config.empty()) {
    if (!fs::exists(g.config)) throw ConfigError("config file not found: " + g.config);
    c = PipelineConfig::from_json(read_text_file(g.config), c);
  }
  return c;
}

void write_graph(const std::string& out, const Graph& g, std::optional<std::uint64_t> seed) {
  if (out.empty() || out == "-") {
    write_edge_list(std::cout, g, seed);
  } else {
    write_edge_list(fs::path(out), g, seed);
  }
}

std::vector<int> read_degrees(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open degree file " + path);
  std::vector<int> out;
  std::string token;
  while (in >> token) {
    if (token.front() == '#') {
      std::getline(in, token);
      continue;
    }
    try {
      std::size_t used = 0;
      const int d = std::stoi(token, &used);
      if (used != token.size() || d < 0) throw std::invalid_argument(token);
      out.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError("degree file " + path + ": bad entry '" + token + "'");
    }
  }
  return out;
}

std::vector<int> degrees_from(const std::string& degree_file, const std::string& graph_file) {
  if (!degree_file.empty() == !graph_file.empty()) {
    throw ConfigError("give exactly one of --degrees or --from-graph");
  }
  if (!degree_file.empty()) return read_degrees(degree_file);
  return read_edge_list(fs::path(graph_file)).graph.degrees();
}

NodeCorrespondence read_correspondence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open correspondence file " + path);
  NodeCorrespondence c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<long long> cols;
    long long x = 0;
    while (fields >> x) cols.push_back(x);
    if (cols.size() < 2 || cols.front() != static_cast<long long>(c.mapping.size())) {
      throw ConfigError("correspondence file " + path + ": expected 'new_id ... original_id' rows in order");
    }
    c.mapping.push_back(static_cast<NodeId>(cols.back()));
  }
  return c;
}

void print_report(const PropertyReport& r, const std::string& format) {
  if (format == "json") {
    std::cout << r.to_json();
  } else {
    std::cout << format_report_table({r});
  }
}

void print_summary(const std::vector<PropertyReport>& reports, const std::string& format) {
  const auto summary = summarize_reports(reports);
  if (format == "json") {
    Json j = Json::array();
    for (const auto& s : summary) j.push_back({{"name", s.name}, {"mean", s.mean}, {"sd", s.sd}, {"samples", s.samples}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_summary_table(summary);
  }
}

std::string trial_path(const std::string& out, int k, int repeat) {
  if (repeat == 1) return out;
  fs::path p(out);
  return (p.parent_path() / (p.stem().string() + "-" + std::to_string(k) + p.extension().string())).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doppel: degree-preserving doppelganger graphs and graph property reports"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--config", g.config, "JSON pipeline configuration");
  app.add_option("--workdir", g.workdir, "Directory for pipeline artifacts");
  app.add_option("--repeat", g.repeat, "Number of seeded repetitions")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  app.fallthrough();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Read a raw edge list and write it in canonical form");
  std::string ingest_in, ingest_out, ingest_ids;
  bool ingest_lcc = false;
  ingest->add_option("graph", ingest_in, "Raw edge list")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--output", ingest_out, "Canonical edge list (default stdout)");
  ingest->add_option("--ids", ingest_ids, "Write 'node<TAB>original id' here");
  ingest->add_flag("--lcc", ingest_lcc, "Keep only the largest connected component");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Property report of one or more graphs");
  std::vector<std::string> metrics_in;
  std::string metrics_ref;
  metrics->add_option("graphs", metrics_in, "Edge lists; several are summarized as mean(±sd)")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--reference", metrics_ref, "Reference graph for the MMD fields")->check(CLI::ExistingFile);

  // compare
  auto* compare = app.add_subcommand("compare", "Side-by-side reports and edge overlap");
  std::string cmp_a, cmp_b, cmp_corr;
  compare->add_option("original", cmp_a)->required()->check(CLI::ExistingFile);
  compare->add_option("generated", cmp_b)->required()->check(CLI::ExistingFile);
  compare->add_option("--correspondence", cmp_corr, "Rows 'new_id ... original_id' (identity when omitted)")
      ->check(CLI::ExistingFile);

  // hh / improved-hh
  auto* hh = app.add_subcommand("hh", "Havel-Hakimi realization of a degree sequence");
  std::string hh_degrees, hh_graph, hh_out, hh_trace;
  hh->add_option("--degrees", hh_degrees, "Whitespace-separated degrees")->check(CLI::ExistingFile);
  hh->add_option("--from-graph", hh_graph, "Take the degrees of this edge list")->check(CLI::ExistingFile);
  hh->add_option("-o,--output", hh_out, "Output edge list (default stdout)");
  hh->add_option("--trace", hh_trace, "Write the step trace here");

  auto* ihh = app.add_subcommand("improved-hh", "Link-probability guided Havel-Hakimi");
  std::string ihh_degrees, ihh_graph, ihh_out, ihh_trace, ihh_emb, ihh_model;
  ihh->add_option("--degrees", ihh_degrees, "Whitespace-separated degrees")->check(CLI::ExistingFile);
  ihh->add_option("--from-graph", ihh_graph, "Take the degrees of this edge list")->check(CLI::ExistingFile);
  ihh->add_option("--embeddings", ihh_emb, "Embedding TSV, one row per node")->required()->check(CLI::ExistingFile);
  ihh->add_option("--model", ihh_model, "Link model JSON")->required()->check(CLI::ExistingFile);
  ihh->add_option("-o,--output", ihh_out, "Output edge list (default stdout)");
  ihh->add_option("--trace", ihh_trace, "Write the step trace here");

  // baselines
  auto* baseline = app.add_subcommand("baseline", "Classical random graph generators");
  baseline->require_subcommand(1);
  std::string base_out = "-";
  bool base_summary = false;
  baseline->add_option("-o,--output", base_out, "Output edge list; with --repeat, -<k> is added to the stem");
  baseline->add_flag("--summary", base_summary, "Print mean(±sd) of the reports over all repetitions");
  baseline->fallthrough();
  std::size_t er_n = 0;
  double er_p = 0.0;
  auto* er = baseline->add_subcommand("er", "Erdos-Renyi G(n, p)");
  er->add_option("-n", er_n)->required();
  er->add_option("-p", er_p)->required()->check(CLI::Range(0.0, 1.0));
  std::size_t ba_n = 0;
  int ba_m = 0;
  auto* ba = baseline->add_subcommand("ba", "Barabasi-Albert preferential attachment");
  ba->add_option("-n", ba_n)->required();
  ba->add_option("-m", ba_m)->required();
  std::string cl_degrees, cl_graph;
  auto* cl = baseline->add_subcommand("chung-lu", "Chung-Lu expected-degree model");
  cl->add_option("--degrees", cl_degrees)->check(CLI::ExistingFile);
  cl->add_option("--from-graph", cl_graph)->check(CLI::ExistingFile);
  std::string conf_graph;
  double conf_overlap = 0.0;
  int conf_retries = 1000;
  auto* conf = baseline->add_subcommand("conf", "Configuration model with a target edge overlap");
  conf->add_option("--from-graph", conf_graph)->required()->check(CLI::ExistingFile);
  conf->add_option("--overlap", conf_overlap, "Fraction of original edges kept")->check(CLI::Range(0.0, 1.0));
  conf->add_option("--max-retries", conf_retries)->capture_default_str();
  for (auto* sub : {er, ba, cl, conf}) sub->fallthrough();

  // train-embed
  auto* tembed = app.add_subcommand("train-embed", "Train node embeddings and the link predictor");
  std::string te_graph, te_features, te_out = ".";
  tembed->add_option("graph", te_graph)->required()->check(CLI::ExistingFile);
  tembed->add_option("--features", te_features, "Dense features, rows 'id x1 ... xk'")->check(CLI::ExistingFile);
  tembed->add_option("--out-dir", te_out)->capture_default_str();

  // train-gan
  auto* tgan = app.add_subcommand("train-gan", "Train the WGAN-GP embedding sampler");
  std::string tg_emb, tg_labels, tg_out = ".";
  tgan->add_option("embeddings", tg_emb)->required()->check(CLI::ExistingFile);
  tgan->add_option("--labels", tg_labels, "Rows 'node label'")->check(CLI::ExistingFile);
  tgan->add_option("--out-dir", tg_out)->capture_default_str();

  // sample
  auto* sample = app.add_subcommand("sample", "Sample embeddings from a trained generator");
  std::string sm_gen, sm_out = "-", sm_labels;
  std::size_t sm_count = 0;
  sample->add_option("--generator", sm_gen)->required()->check(CLI::ExistingFile);
  sample->add_option("--count", sm_count)->required()->check(CLI::PositiveNumber);
  sample->add_option("-o,--output", sm_out, "Embedding TSV (default stdout)");
  sample->add_option("--labels-out", sm_labels, "Decoded labels, when the generator models them");

  // generate
  auto* generate = app.add_subcommand("generate", "Run the full doppelganger pipeline");
  std::string gen_graph, gen_features, gen_labels;
  bool gen_smoke = false, gen_fresh = false, gen_trace = false;
  generate->add_option("graph", gen_graph, "Input edge list (or 'graph' in --config)");
  generate->add_option("--features", gen_features)->check(CLI::ExistingFile);
  generate->add_option("--labels", gen_labels)->check(CLI::ExistingFile);
  generate->add_flag("--smoke", gen_smoke, "Reduced epochs and steps");
  generate->add_flag("--no-resume", gen_fresh, "Rerun every stage");
  generate->add_flag("--trace", gen_trace, "Record the realization trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ingest->parsed()) {
      const IngestResult raw = read_edge_list(fs::path(ingest_in));
      Graph out = raw.graph;
      std::vector<std::uint64_t> ids = raw.original_ids;
      if (ingest_lcc) {
        const InducedSubgraph lcc = largest_connected_component_with_ids(raw.graph);
        out = lcc.graph;
        ids.clear();
        for (NodeId v : lcc.original_ids) ids.push_back(raw.original_ids[static_cast<std::size_t>(v)]);
      }
      write_graph(ingest_out, out, std::nullopt);
      if (!ingest_ids.empty()) {
        std::ofstream os(ingest_ids);
        for (std::size_t i = 0; i < ids.size(); ++i) os << i << '\t' << ids[i] << '\n';
      }
      std::cerr << "nodes " << out.node_count() << " edges " << out.edge_count() << " dropped self-loops "
                << raw.dropped.self_loops << " duplicates " << raw.dropped.duplicates << '\n';
    } else if (metrics->parsed()) {
      std::optional<Graph> ref;
      if (!metrics_ref.empty()) ref = read_edge_list(fs::path(metrics_ref)).graph;
      std::vector<PropertyReport> reports;
      for (const auto& path : metrics_in) {
        PropertyReport r = property_report(read_edge_list(fs::path(path)).graph, ref ? &*ref : nullptr);
        r.graph_id = path;
        r.reference_id = metrics_ref;
        reports.push_back(std::move(r));
      }
      if (reports.size() == 1) {
        print_report(reports.front(), g.format);
      } else {
        print_summary(reports, g.format);
      }
    } else if (compare->parsed()) {
      const Graph a = read_edge_list(fs::path(cmp_a)).graph;
      const Graph b = read_edge_list(fs::path(cmp_b)).graph;
      NodeCorrespondence corr;
      if (cmp_corr.empty()) {
        if (a.node_count() != b.node_count()) {
          throw ConfigError("node counts differ (" + std::to_string(a.node_count()) + " vs " +
                            std::to_string(b.node_count()) + "); pass --correspondence");
        }
        corr = NodeCorrespondence::identity(a.node_count());
      } else {
        corr = read_correspondence(cmp_corr);
      }
      if (corr.size() != b.node_count() || a.node_count() != b.node_count() || !corr.is_bijection()) {
        throw ConfigError("correspondence must be a bijection between the two node sets");
      }
      PropertyReport ra = property_report(a);
      ra.graph_id = cmp_a;
      PropertyReport rb = property_report(b, &a);
      rb.graph_id = cmp_b;
      rb.reference_id = cmp_a;
      const double overlap = edge_overlap(b, a, corr);
      if (g.format == "json") {
        Json j;
        j["original"] = Json::parse(ra.to_json());
        j["generated"] = Json::parse(rb.to_json());
        j["edge_overlap"] = overlap;
        std::cout << j.dump(2) << '\n';
      } else {
        std::printf("%-30s %16s %16s %16s\n", "metric", "original", "generated", "delta");
        for (const auto& e : rb.entries) {
          const MetricEntry* o = ra.find(e.name);
          if (o) {
            std::printf("%-30s %16.6g %16.6g %16.6g\n", e.name.c_str(), o->value, e.value, e.value - o->value);
          } else {
            std::printf("%-30s %16s %16.6g %16s\n", e.name.c_str(), "", e.value, "");
          }
        }
        std::printf("%-30s %16s %16.6g\n", "edge_overlap", "", overlap);
      }
    } else if (hh->parsed()) {
      const std::vector<int> degrees = degrees_from(hh_degrees, hh_graph);
      const HavelHakimiResult r = havel_hakimi(degrees, !hh_trace.empty());
      if (!r.ok()) throw NonGraphic("sequence is not graphic (stuck at node " + std::to_string(r.stuck_node) + ")");
      write_graph(hh_out, *r.graph, std::nullopt);
      if (!hh_trace.empty()) write_text_file(hh_trace, r.trace.to_text());
    } else if (ihh->parsed()) {
      const std::vector<int> degrees = degrees_from(ihh_degrees, ihh_graph);
      if (!is_graphic(degrees)) throw NonGraphic("sequence is not graphic");
      const LinkModel model = link_model_from_json(read_text_file(ihh_model));
      std::ifstream in(ihh_emb);
      const EmbeddingMatrix emb = read_embeddings(in);
      if (static_cast<std::size_t>(emb.rows()) != degrees.size()) {
        throw ConfigError("embedding rows differ from the number of degrees");
      }
      const ImprovedHHResult r = improved_hh(degrees, PredictorOracle(model.predictor, emb), !ihh_trace.empty());
      write_graph(ihh_out, r.graph, std::nullopt);
      if (!ihh_trace.empty()) write_text_file(ihh_trace, r.trace.to_text());
      std::cerr << "stub deficit " << r.stub_deficit << ", skipped hubs " << r.skipped_hubs.size() << '\n';
    } else if (baseline->parsed()) {
      std::optional<Graph> source;
      std::vector<int> degrees;
      if (cl->parsed()) degrees = degrees_from(cl_degrees, cl_graph);
      if (conf->parsed()) source = read_edge_list(fs::path(conf_graph)).graph;
      std::vector<PropertyReport> reports;
      for (int k = 0; k < g.repeat; ++k) {
        const std::uint64_t seed = g.repeat == 1 ? g.seed : derive_seed(g.seed, static_cast<std::uint64_t>(k));
        Graph out;
        if (er->parsed()) {
          out = er_graph(er_n, er_p, seed);
        } else if (ba->parsed()) {
          out = ba_graph(ba_n, ba_m, seed);
        } else if (cl->parsed()) {
          out = chung_lu(degrees, seed);
        } else {
          ConfModelResult r = conf_model(*source, conf_overlap, conf_retries, seed);
          if (!r.graph) {
            throw StageFailure("conf", "no valid pairing in " + std::to_string(r.attempts) + " attempts");
          }
          out = *r.graph;
        }
        if (base_summary) {
          PropertyReport r = property_report(out);
          r.seed = seed;
          reports.push_back(std::move(r));
          if (base_out == "-") continue;
        }
        write_graph(trial_path(base_out, k, g.repeat), out, seed);
      }
      if (base_summary) print_summary(reports, g.format);
    } else if (tembed->parsed()) {
      PipelineConfig cfg = load_config(g);
      const Graph graph = read_edge_list(fs::path(te_graph)).graph;
      std::optional<Matrix> features;
      if (!te_features.empty()) {
        std::ifstream in(te_features);
        const auto map = read_feature_map(in);
        for (std::size_t i = 0; i < graph.node_count(); ++i) {
          auto it = map.find(i);
          if (it == map.end()) throw ConfigError("no features for node " + std::to_string(i));
          if (!features) features = Matrix(static_cast<Eigen::Index>(graph.node_count()), static_cast<Eigen::Index>(it->second.size()));
          for (std::size_t k = 0; k < it->second.size(); ++k) {
            (*features)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = it->second[k];
          }
        }
      }
      EmbeddingConfig ec = cfg.embedding;
      ec.seed = g.seed;
      TrainedEmbedding t = train_embedding(graph, features, ec, [](const RoundProgress& p, const LinkModel&) {
        std::cerr << "cycle " << p.cycle + 1 << " round " << p.round + 1 << " negatives " << p.negatives << " loss "
                  << p.loss << '\n';
      });
      fs::create_directories(te_out);
      write_text_file(fs::path(te_out) / "link_model.json", link_model_to_json(t.model, g.seed));
      std::ofstream os(fs::path(te_out) / "embeddings.tsv", std::ios::binary);
      write_embeddings(os, t.embeddings, g.seed);
    } else if (tgan->parsed()) {
      PipelineConfig cfg = load_config(g);
      std::ifstream in(tg_emb);
      const EmbeddingMatrix emb = read_embeddings(in);
      std::optional<std::vector<int>> labels;
      if (!tg_labels.empty()) {
        std::ifstream lin(tg_labels);
        const auto map = read_label_map(lin);
        labels.emplace();
        for (Eigen::Index i = 0; i < emb.rows(); ++i) {
          auto it = map.find(static_cast<std::uint64_t>(i));
          if (it == map.end()) throw ConfigError("no label for node " + std::to_string(i));
          labels->push_back(it->second);
        }
      }
      GanConfig gc = cfg.gan;
      gc.seed = g.seed;
      TrainedGan t = train_gan(emb, labels, gc, [](const GanDiagnostic& d) {
        std::cerr << "step " << d.step << " critic " << d.critic_loss << " mmd " << d.mmd << '\n';
      });
      fs::create_directories(tg_out);
      write_text_file(fs::path(tg_out) / "generator.json", generator_to_json(t.generator, g.seed));
      write_text_file(fs::path(tg_out) / "critic.json", critic_to_json(t.critic, g.seed));
      std::ofstream os(fs::path(tg_out) / "gan_diagnostics.csv", std::ios::binary);
      os << "step,critic_loss,generator_loss,mmd\n";
      char buf[128];
      for (const auto& d : t.history) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", d.step, d.critic_loss, d.generator_loss, d.mmd);
        os << buf;
      }
    } else if (sample->parsed()) {
      const GeneratorParams gen = generator_from_json(read_text_file(sm_gen));
      const GeneratedSample s = sample_embeddings(gen, sm_count, g.seed);
      if (sm_out == "-") {
        write_embeddings(std::cout, s.embeddings, g.seed);
      } else {
        std::ofstream os(sm_out, std::ios::binary);
        write_embeddings(os, s.embeddings, g.seed);
      }
      if (!sm_labels.empty() && s.labels) {
        std::ofstream os(sm_labels, std::ios::binary);
        write_labels(os, *s.labels, g.seed);
      }
    } else if (generate->parsed()) {
      PipelineConfig cfg = load_config(g, gen_smoke ? PipelineConfig::smoke() : PipelineConfig{});
      if (!gen_graph.empty()) cfg.graph = gen_graph;
      if (!gen_features.empty()) cfg.features = gen_features;
      if (!gen_labels.empty()) cfg.labels = gen_labels;
      if (!g.workdir.empty()) cfg.workdir = g.workdir;
      if (app.get_option("--seed")->count() > 0) {
        cfg.seed = g.seed;
        cfg.seeds.reset();
      }
      if (gen_trace) cfg.trace = true;
      cfg.validate();
      if (g.repeat > 1) {
        const auto ranked = run_repeated(cfg, g.repeat, !gen_fresh, &std::cerr);
        for (const auto& t : ranked) {
          std::cout << "trial " << t.trial << " seed " << t.seed << " distance " << t.distance << " " << t.workdir.string()
                    << '\n';
        }
      } else {
        const PipelineResult r = run_pipeline(cfg, !gen_fresh, &std::cerr);
        print_report(r.report, g.format);
        if (g.format == "table") {
          std::cout << "edge_overlap " << r.edge_overlap << " (degree-rank correspondence)\n"
                    << "stub_deficit " << r.stub_deficit << '\n';
        }
      }
    }
  } catch (const NonGraphic& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonGraphic;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}
