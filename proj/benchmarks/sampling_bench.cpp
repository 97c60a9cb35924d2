#include <benchmark/benchmark.h>

#include "splatrig/rng.hpp"
#include "splatrig/sampling.hpp"

using namespace splatrig;

namespace {
PointSet bench_points(size_t n) {
  Rng rng(11);
  PointSet p;
  for (size_t i = 0; i < n; ++i)
    p.positions.emplace_back(rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-1, 1));
  return p;
}
}  // namespace

static void Fps(benchmark::State& state) {
  const PointSet p = bench_points(size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fps(p, 8192 < p.size() ? 8192 : p.size() / 2, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Fps)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BallQueryNearest(benchmark::State& state) {
  const PointSet p = bench_points(8192);
  const auto centers_idx = fps(p, 512, 0);
  std::vector<Vec3> centers;
  for (uint32_t i : centers_idx) centers.push_back(p.positions[i]);
  for (auto _ : state) benchmark::DoNotOptimize(ball_query_nearest(p, centers, 0.2, 16));
}
BENCHMARK(BallQueryNearest)->Unit(benchmark::kMillisecond);

static void KnnPropagate(benchmark::State& state) {
  PointSet sampled = bench_points(8192);
  sampled.labels.emplace(sampled.size(), 0);
  const PointSet full = bench_points(20000);
  for (auto _ : state) benchmark::DoNotOptimize(knn_propagate(sampled, full, 3));
}
BENCHMARK(KnnPropagate)->Unit(benchmark::kMillisecond);
