#include <benchmark/benchmark.h>

#include "onoff/em_reconstruction.hpp"
#include "onoff/experiment_sim.hpp"
#include "onoff/model_fitting.hpp"

using namespace onoff;

namespace {

std::vector<OnOffRecord> records_of(const char* name) {
  auto spec = preset(name);
  spec.seed = 1;
  return simulate_counts(spec);
}

void BM_EmStep(benchmark::State& state) {
  const int n_bar = static_cast<int>(state.range(0));
  const auto grid = EfficiencyGrid::linear(0.005, 0.2, 24);
  const VisibilityMatrix A(grid, n_bar);
  const auto f = no_click_vector(thermal(5.33, n_bar), grid);
  PhotonDistribution rho(std::vector<double>(A.cols(), 1.0));
  for (auto _ : state) {
    rho = em_step(rho, A, f);
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_EmStep)->Arg(8)->Arg(26)->Arg(100)->Arg(400);

void BM_Reconstruct(benchmark::State& state, const char* name, std::int64_t iterations) {
  const auto records = records_of(name);
  ReconstructionConfig config;
  config.max_iterations = iterations;
  config.history_stride = iterations;
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(records, config));
  state.SetItemsProcessed(state.iterations() * iterations);
}
BENCHMARK_CAPTURE(BM_Reconstruct, pulsed_thermal, "pulsed_thermal", 400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reconstruct, pulsed_gaussian, "pulsed_gaussian", 50'000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reconstruct, heralded_photon, "heralded_photon", 100'000)->Unit(benchmark::kMillisecond);

void BM_SimulateCounts(benchmark::State& state) {
  auto spec = preset("pulsed_gaussian");
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(simulate_counts(spec));
  }
}
BENCHMARK(BM_SimulateCounts)->Unit(benchmark::kMillisecond);

void BM_RankModels(benchmark::State& state) {
  const auto rho = multithermal(6.17, 5, 40);
  for (auto _ : state) benchmark::DoNotOptimize(rank_models(rho));
}
BENCHMARK(BM_RankModels)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
