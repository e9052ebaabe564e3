#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "doppel/edge_list.hpp"
#include "doppel/serialize.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace doppel;
using namespace doppel::testing;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(DOPPEL_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("doppel-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_edge_list(dir_ / "k4.edgelist", complete_graph(4));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, MetricsAgainstItselfHasZeroMmd) {
  const CliRun r = run_cli("--format json metrics " + path("k4.edgelist") + " --reference " + path("k4.edgelist"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("triangle_count"), 4.0);
  EXPECT_EQ(j.at("local_clustering_mmd"), 0.0);
  EXPECT_EQ(j.at("degree_distribution_mmd"), 0.0);
  EXPECT_EQ(j.at("local_square_clustering_mmd"), 0.0);
}

TEST_F(CliTest, CompareWithItselfHasFullOverlap) {
  const CliRun r = run_cli("--format json compare " + path("k4.edgelist") + " " + path("k4.edgelist"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("edge_overlap"), 1.0);
}

TEST_F(CliTest, CompareNeedsCorrespondenceAcrossNodeSets) {
  write_edge_list(dir_ / "k5.edgelist", complete_graph(5));
  EXPECT_EQ(run_cli("compare " + path("k4.edgelist") + " " + path("k5.edgelist")).code, 2);
}

TEST_F(CliTest, HavelHakimiExitCodes) {
  std::ofstream(path("ok.txt")) << "2 2 2\n";
  std::ofstream(path("bad.txt")) << "3 3 1 1\n";
  const CliRun ok = run_cli("hh --degrees " + path("ok.txt") + " -o " + path("tri.edgelist"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(read_edge_list(fs::path(path("tri.edgelist"))).graph, complete_graph(3));
  EXPECT_EQ(run_cli("hh --degrees " + path("bad.txt")).code, 4);
  EXPECT_EQ(run_cli("hh").code, 2);
}

TEST_F(CliTest, ConfigErrors) {
  std::ofstream(path("cfg.json")) << R"({"unknown": 1})";
  EXPECT_EQ(run_cli("--config " + path("cfg.json") + " generate " + path("k4.edgelist")).code, 2);
  EXPECT_EQ(run_cli("--config " + path("missing.json") + " generate " + path("k4.edgelist")).code, 2);
  EXPECT_EQ(run_cli("generate").code, 2);
  std::ofstream(path("junk.edgelist")) << "0 x\n";
  EXPECT_EQ(run_cli("metrics " + path("junk.edgelist")).code, 2);
}

TEST_F(CliTest, StageFailureExitCode) {
  std::ofstream(path("labels.tsv")) << "0 nope\n";
  EXPECT_EQ(run_cli("generate " + path("k4.edgelist") + " --smoke --labels " + path("labels.tsv") +
                    " --workdir " + path("run"))
                .code,
            3);
}

TEST_F(CliTest, BaselineRepeatWritesEveryTrial) {
  const CliRun r = run_cli("--seed 3 --repeat 3 baseline -o " + path("er.edgelist") + " er -n 30 -p 0.2");
  ASSERT_EQ(r.code, 0);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(fs::exists(path("er-" + std::to_string(k) + ".edgelist"))) << k;
  EXPECT_NE(read_text_file(path("er-0.edgelist")), read_text_file(path("er-1.edgelist")));
}
