#include "doppel/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace doppel {
namespace {

using Json = nlohmann::ordered_json;

Json matrix_entry(const std::string& name, const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return Json{{"name", name}, {"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Matrix matrix_from(const Json& entry) {
  const auto& shape = entry.at("shape");
  const auto rows = shape.at(0).get<Eigen::Index>();
  const auto cols = shape.at(1).get<Eigen::Index>();
  const auto& data = entry.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw FormatError("parameter '" + entry.at("name").get<std::string>() + "' has " +
                      std::to_string(data.size()) + " values for shape " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i * cols + j)].get<double>();
  }
  return m;
}

Json document(const std::string& kind, const std::vector<NamedParam>& params, std::optional<std::uint64_t> seed) {
  Json doc;
  doc["kind"] = kind;
  doc["seed"] = seed ? Json(*seed) : Json(nullptr);
  doc["params"] = Json::array();
  for (const auto& p : params) doc["params"].push_back(matrix_entry(p.name, *p.value));
  return doc;
}

Json parse(const std::string& text, const std::string& kind) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed parameter file: ") + e.what());
  }
  if (doc.value("kind", "") != kind) throw FormatError("expected a '" + kind + "' parameter file");
  return doc;
}

// Fills `params` by name; every named slot must be present.
void assign(const Json& doc, const std::vector<NamedParam>& params) {
  std::unordered_map<std::string, const Json*> by_name;
  for (const auto& entry : doc.at("params")) by_name[entry.at("name").get<std::string>()] = &entry;
  for (const auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw FormatError("missing parameter '" + p.name + "'");
    *p.value = matrix_from(*it->second);
  }
}

// Rebuilds an Mlp whose layer shapes are read from "<prefix>fcI.weight".
Mlp mlp_from(const Json& doc, const std::string& prefix, Activation act) {
  std::vector<Matrix> weights;
  for (const auto& entry : doc.at("params")) {
    const auto name = entry.at("name").get<std::string>();
    if (name.rfind(prefix + "fc", 0) == 0 && name.ends_with(".weight")) weights.push_back(matrix_from(entry));
  }
  if (weights.empty()) throw FormatError("no layers under '" + prefix + "'");
  std::vector<int> sizes{static_cast<int>(weights.front().rows())};
  for (const auto& w : weights) sizes.push_back(static_cast<int>(w.cols()));
  Rng unused(0);
  Mlp net(sizes, act, unused);
  assign(doc, net.params(prefix));
  return net;
}

std::string dump(const Json& doc) { return doc.dump(1) + "\n"; }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

std::string link_model_to_json(LinkModel& model, std::optional<std::uint64_t> seed) {
  Json doc = document("link_model", model.params(), seed);
  doc["leak"] = model.predictor.leak;
  return dump(doc);
}

LinkModel link_model_from_json(const std::string& text) {
  const Json doc = parse(text, "link_model");
  LinkModel m;
  assign(doc, m.params());
  m.predictor.leak = doc.value("leak", 0.01);
  return m;
}

std::string generator_to_json(GeneratorParams& gen, std::optional<std::uint64_t> seed) {
  auto params = gen.net.params("generator.");
  Matrix shift = gen.shift;
  Matrix scale = gen.scale;
  params.push_back({"generator.shift", &shift});
  params.push_back({"generator.scale", &scale});
  Json doc = document("generator", params, seed);
  doc["latent_dim"] = gen.latent_dim;
  doc["embedding_dim"] = gen.embedding_dim;
  doc["num_classes"] = gen.num_classes;
  return dump(doc);
}

GeneratorParams generator_from_json(const std::string& text) {
  const Json doc = parse(text, "generator");
  GeneratorParams g;
  g.net = mlp_from(doc, "generator.", Activation::kRelu);
  g.latent_dim = doc.at("latent_dim").get<int>();
  g.embedding_dim = doc.at("embedding_dim").get<int>();
  g.num_classes = doc.at("num_classes").get<int>();
  Matrix shift;
  Matrix scale;
  assign(doc, {{"generator.shift", &shift}, {"generator.scale", &scale}});
  g.shift = shift;
  g.scale = scale;
  if (g.net.input_dim() != g.latent_dim || g.net.output_dim() != g.output_dim() ||
      g.shift.size() != g.embedding_dim || g.scale.size() != g.embedding_dim) {
    throw FormatError("generator file: layer shapes disagree with the declared dimensions");
  }
  return g;
}

std::string critic_to_json(CriticParams& critic, std::optional<std::uint64_t> seed) {
  return dump(document("critic", critic.net.params("critic."), seed));
}

CriticParams critic_from_json(const std::string& text) {
  return {mlp_from(parse(text, "critic"), "critic.", Activation::kRelu)};
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& emb, std::optional<std::uint64_t> seed) {
  if (seed) out << "# seed " << *seed << '\n';
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < emb.cols(); ++j) out << '\t' << format_double(emb(i, j));
    out << '\n';
  }
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    std::size_t id = 0;
    if (!(fields >> id) || id != rows.size()) {
      throw FormatError("embeddings line " + std::to_string(line_no) + ": expected row id " +
                        std::to_string(rows.size()));
    }
    std::vector<double> row;
    double x = 0.0;
    while (fields >> x) row.push_back(x);
    if (!fields.eof()) throw FormatError("embeddings line " + std::to_string(line_no) + ": bad number");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("embeddings line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  EmbeddingMatrix emb(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      emb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return emb;
}

void write_labels(std::ostream& out, const std::vector<int>& labels, std::optional<std::uint64_t> seed) {
  if (seed) out << "# seed " << *seed << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels[i] << '\n';
}

std::unordered_map<std::uint64_t, int> read_label_map(std::istream& in) {
  std::unordered_map<std::uint64_t, int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    std::uint64_t id = 0;
    int label = 0;
    if (!(fields >> id >> label) || label < 0) {
      throw FormatError("labels line " + std::to_string(line_no) + ": expected 'id label'");
    }
    out[id] = label;
  }
  return out;
}

std::unordered_map<std::uint64_t, std::vector<double>> read_feature_map(std::istream& in) {
  std::unordered_map<std::uint64_t, std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    std::uint64_t id = 0;
    if (!(fields >> id)) throw FormatError("features line " + std::to_string(line_no) + ": expected id");
    std::vector<double> row;
    double x = 0.0;
    while (fields >> x) row.push_back(x);
    if (!fields.eof() || row.empty() || (width != 0 && row.size() != width)) {
      throw FormatError("features line " + std::to_string(line_no) + ": bad or ragged row");
    }
    width = row.size();
    out[id] = std::move(row);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string digest_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, value);
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return digest_hex(h);
}

}  // namespace doppel
