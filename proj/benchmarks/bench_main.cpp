#include <random>

#include <benchmark/benchmark.h>

#include "ecmmd/datagen.hpp"
#include "ecmmd/estimator.hpp"
#include "ecmmd/knn_graph.hpp"
#include "ecmmd/resampling.hpp"

namespace {

ecmmd::Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  ecmmd::Matrix m(rows, cols);
  for (double& v : m.values()) v = nd(gen);
  return m;
}

void BM_KnnBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ecmmd::Matrix z = gaussian(n, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecmmd::KnnGraph::build(z, 10));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnBuild)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EdgeSums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ecmmd::PairedDataset d{gaussian(n, 1, 2), gaussian(n, 1, 3), gaussian(n, 3, 4)};
  const ecmmd::KnnGraph g = ecmmd::KnnGraph::build(d.z, 10);
  const ecmmd::Kernel k = ecmmd::Kernel::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ecmmd::edge_sums(d.x, d.y, k, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EdgeSums)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AsymptoticTest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ecmmd::PairedDataset d{gaussian(n, 1, 5), gaussian(n, 1, 6), gaussian(n, 3, 7)};
  for (auto _ : state) {
    const ecmmd::Kernel k = ecmmd::Kernel::gaussian(ecmmd::median_bandwidth(d));
    benchmark::DoNotOptimize(ecmmd::asymptotic_test(d, k, 10, 0.05));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AsymptoticTest)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_FiniteSampleTest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ecmmd::GofScenario s = ecmmd::gen_gof_gaussian(n, 3, 0.0, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ecmmd::finite_sample_test(s.data, s.sampler, 99, ecmmd::KernelSpec::gaussian_median(), 10, 9));
  }
}
BENCHMARK(BM_FiniteSampleTest)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
