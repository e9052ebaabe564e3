#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "doppel/serialize.hpp"
#include "support.hpp"

using namespace doppel;
using namespace doppel::testing;

namespace {

void expect_same_params(std::vector<NamedParam> a, std::vector<NamedParam> b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(*a[i].value, *b[i].value) << a[i].name;
  }
}

}  // namespace

TEST(Serialize, LinkModelRoundTripIsExact) {
  Rng rng(1);
  const Graph g = cycle_graph(7);
  const EncoderInput input(g);
  LinkModel m = LinkModel::initialize(input, 5, 4, 3, 0.02, rng);
  LinkModel back = link_model_from_json(link_model_to_json(m, 99));
  expect_same_params(m.params(), back.params());
  EXPECT_EQ(back.predictor.leak, 0.02);
  EXPECT_EQ(back.embed(input), m.embed(input));
}

TEST(Serialize, GeneratorAndCriticRoundTrip) {
  Rng rng(2);
  GeneratorParams gen = GeneratorParams::create(6, 2, 16, rng);
  gen.shift = RowVector::LinSpaced(6, -1.0, 1.0);
  gen.scale = RowVector::Constant(6, 0.3);
  GeneratorParams gen_back = generator_from_json(generator_to_json(gen, 5));
  EXPECT_EQ(gen_back.latent_dim, 16);
  EXPECT_EQ(gen_back.embedding_dim, 6);
  EXPECT_EQ(gen_back.num_classes, 2);
  EXPECT_EQ(gen_back.shift, gen.shift);
  EXPECT_EQ(gen_back.scale, gen.scale);
  EXPECT_EQ(gen_back.net.sizes(), gen.net.sizes());
  expect_same_params(gen.net.params("generator."), gen_back.net.params("generator."));
  EXPECT_EQ(sample_embeddings(gen_back, 10, 3).embeddings, sample_embeddings(gen, 10, 3).embeddings);

  CriticParams critic = CriticParams::create(8, rng);
  CriticParams critic_back = critic_from_json(critic_to_json(critic));
  EXPECT_EQ(critic_back.net.sizes(), critic.net.sizes());
  expect_same_params(critic.net.params("critic."), critic_back.net.params("critic."));
}

TEST(Serialize, RejectsMalformedDocuments) {
  EXPECT_THROW(link_model_from_json("{"), FormatError);
  EXPECT_THROW(link_model_from_json(R"({"kind": "generator", "params": []})"), FormatError);
  Rng rng(3);
  GeneratorParams gen = GeneratorParams::create(2, 0, 4, rng);
  std::string text = generator_to_json(gen);
  EXPECT_THROW(link_model_from_json(text), FormatError);
  const auto at = text.find("\"shape\"");
  ASSERT_NE(at, std::string::npos);
  text.replace(text.find('[', at) + 1, 1, "9");
  EXPECT_THROW(generator_from_json(text), FormatError);
}

TEST(Serialize, EmbeddingsRoundTripBitExact) {
  Rng rng(4);
  Matrix emb(5, 3);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = rng.normal() * 1e-3 + 1.0 / 3.0;
  std::stringstream buf;
  write_embeddings(buf, emb, 12);
  EXPECT_EQ(buf.str().rfind("# seed 12\n", 0), 0u);
  EXPECT_EQ(read_embeddings(buf), emb);

  std::stringstream gap("0\t1\t2\n2\t3\t4\n");
  EXPECT_THROW(read_embeddings(gap), FormatError);
  std::stringstream ragged("0\t1\t2\n1\t3\n");
  EXPECT_THROW(read_embeddings(ragged), FormatError);
}

TEST(Serialize, LabelsAndFeatures) {
  std::stringstream out;
  write_labels(out, {2, 0, 1}, 4);
  const auto labels = read_label_map(out);
  EXPECT_EQ(labels.at(0), 2);
  EXPECT_EQ(labels.at(2), 1);

  std::stringstream features("# comment\n10 0.5 1.5\n20 2 3\n");
  const auto f = read_feature_map(features);
  EXPECT_EQ(f.at(10), (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(f.at(20), (std::vector<double>{2, 3}));
  std::stringstream bad("1 x\n");
  EXPECT_THROW(read_feature_map(bad), FormatError);
}

TEST(Serialize, FileDigest) {
  const auto dir = std::filesystem::temp_directory_path() / "doppel-serialize-test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.txt", "");
  // FNV-1a 64 offset basis for empty input, then the published value for "a".
  EXPECT_EQ(file_digest(dir / "a.txt"), "cbf29ce484222325");
  write_text_file(dir / "a.txt", "a");
  EXPECT_EQ(file_digest(dir / "a.txt"), "af63dc4c8601ec8c");
  EXPECT_EQ(read_text_file(dir / "a.txt"), "a");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), std::runtime_error);
  std::filesystem::remove_all(dir);
}
