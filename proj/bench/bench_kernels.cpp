// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "srgan/numeric_core.hpp"
#include "srgan/prdc.hpp"
#include "srgan/prdc_reference.hpp"
#include "srgan/restriction_losses.hpp"

namespace {

using namespace srgan;

void BM_PrdcParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto real = seeded_standard_normal(n, 16, 1);
  const auto fake = seeded_standard_normal(n, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_prdc(real, fake, {5}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PrdcParallel)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_PrdcReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto real = seeded_standard_normal(n, 16, 1);
  const auto fake = seeded_standard_normal(n, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::compute_prdc(real, fake, {5}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PrdcReference)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_KnnRadiusParallel(benchmark::State& state) {
  const auto set = seeded_standard_normal(static_cast<std::size_t>(state.range(0)), 16, 3);
  for (auto _ : state) benchmark::DoNotOptimize(knn_radius(set, 5));
}
BENCHMARK(BM_KnnRadiusParallel)->Arg(512)->Arg(2048);

void BM_KnnRadiusReference(benchmark::State& state) {
  const auto set = seeded_standard_normal(static_cast<std::size_t>(state.range(0)), 16, 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::knn_radius(set, 5));
}
BENCHMARK(BM_KnnRadiusReference)->Arg(512)->Arg(2048);

// Arg(1): threads; 0 means the OpenMP default.
void BM_HistogramLoss(benchmark::State& state) {
  const auto b = seeded_standard_normal(1024, 8, 4);
  const int saved = omp_get_max_threads();
  if (state.range(0) > 0) omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(histogram_imitation_loss(b));
  omp_set_num_threads(saved);
}
BENCHMARK(BM_HistogramLoss)->Arg(1)->Arg(0);

}  // namespace

BENCHMARK_MAIN();
