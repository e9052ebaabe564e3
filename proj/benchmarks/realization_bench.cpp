#include <benchmark/benchmark.h>

#include "doppel/baselines.hpp"
#include "doppel/embedding.hpp"
#include "doppel/random.hpp"
#include "doppel/realization.hpp"

namespace {

using namespace doppel;

std::vector<int> ba_degrees(benchmark::State& state) {
  return ba_graph(static_cast<std::size_t>(state.range(0)), 4, 3).degrees();
}

void BM_HavelHakimi(benchmark::State& state) {
  const auto d = ba_degrees(state);
  for (auto _ : state) benchmark::DoNotOptimize(havel_hakimi(d));
}
BENCHMARK(BM_HavelHakimi)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_ImprovedHavelHakimi(benchmark::State& state) {
  const auto d = ba_degrees(state);
  const std::size_t n = d.size();
  const FunctionOracle oracle(n, [](NodeId i, NodeId j) {
    return static_cast<double>(derive_seed(7, static_cast<std::uint64_t>(i) * 65536 + static_cast<std::uint64_t>(j)) >>
                               11) *
           0x1.0p-53;
  });
  for (auto _ : state) benchmark::DoNotOptimize(improved_hh(d, oracle));
}
BENCHMARK(BM_ImprovedHavelHakimi)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PredictorOracle(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  Matrix emb(n, 64);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = rng.normal();
  const LinkPredictor pred = LinkPredictor::glorot(64, 32, rng);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_from(pred, emb));
}
BENCHMARK(BM_PredictorOracle)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
