// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "gsup/kernels.hpp"
#include "gsup/rng.hpp"

using namespace gsup;

namespace {

DataMatrix cloud(Eigen::Index n, Eigen::Index p, double sd) {
  CounterRng rng(n * 31 + p);
  DataMatrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < p; ++c) m(i, c) = sd * rng.normal();
  }
  return m;
}

// Spread 8 in scaled units keeps most pairs outside the support radius of s = 0.025.
constexpr double kSparse = 8.0;
constexpr double kDense = 1.0;

void BM_BlurringSerial(benchmark::State& state) {
  const auto reps = cloud(state.range(0), 20, state.range(1) ? kDense : kSparse);
  DataMatrix out;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::blurring_sweep_serial(reps, {}, 0.025, out));
  state.SetComplexityN(state.range(0));
}

void BM_BlurringOmp(benchmark::State& state) {
  const auto reps = cloud(state.range(0), 20, state.range(1) ? kDense : kSparse);
  DataMatrix out;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::blurring_sweep_omp(reps, {}, 0.025, out));
  state.SetComplexityN(state.range(0));
}

void BM_BlurringOmpNeighborList(benchmark::State& state) {
  const auto reps = cloud(state.range(0), 20, state.range(1) ? kDense : kSparse);
  DataMatrix out;
  kernels::NeighborList list;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::blurring_sweep_omp(reps, {}, 0.025, out, 0, &list));
  state.SetComplexityN(state.range(0));
}

void BM_NonblurringSerial(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, kSparse);
  DataMatrix out;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nonblurring_sweep_serial(data, data, 0.025, out));
}

void BM_NonblurringOmp(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, kSparse);
  DataMatrix out;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nonblurring_sweep_omp(data, data, 0.025, out));
}

void BM_NearestNeighborSerial(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_neighbor_dist2_serial(data));
}

void BM_NearestNeighborOmp(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_neighbor_dist2_omp(data));
}

void BM_AssignSerial(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, 1.0);
  const auto centers = cloud(16, 20, 1.0);
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  std::vector<double> d2(labels.size());
  for (auto _ : state) kernels::assign_nearest_serial(data, centers, labels, d2);
}

void BM_AssignOmp(benchmark::State& state) {
  const auto data = cloud(state.range(0), 20, 1.0);
  const auto centers = cloud(16, 20, 1.0);
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  std::vector<double> d2(labels.size());
  for (auto _ : state) kernels::assign_nearest_omp(data, centers, labels, d2);
}

}  // namespace

// Second argument: 0 sparse weights, 1 dense weights.
BENCHMARK(BM_BlurringSerial)->ArgsProduct({{800, 3200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlurringOmp)->ArgsProduct({{800, 3200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlurringOmpNeighborList)->ArgsProduct({{800, 3200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonblurringSerial)->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonblurringOmp)->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestNeighborSerial)->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestNeighborOmp)->Arg(800)->Arg(3200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignSerial)->Arg(6400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AssignOmp)->Arg(6400)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
