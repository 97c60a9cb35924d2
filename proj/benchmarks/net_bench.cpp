#include <benchmark/benchmark.h>

#include "splatrig/net.hpp"
#include "splatrig/synth.hpp"
#include "splatrig/train.hpp"

using namespace splatrig;

static void SegForward(benchmark::State& state) {
  CarSpec spec;
  spec.total_points = 20000;
  const GeneratedCar car = generate(spec);
  SegNet net((NetConfig()));
  for (auto _ : state) benchmark::DoNotOptimize(infer_labels(net, car.asset));
}
BENCHMARK(SegForward)->Unit(benchmark::kMillisecond);

static void KinForward(benchmark::State& state) {
  CarSpec spec;
  spec.total_points = 20000;
  const GeneratedCar car = generate(spec);
  KinNet net((NetConfig()));
  for (auto _ : state) benchmark::DoNotOptimize(infer_kinematics(net, car.asset));
}
BENCHMARK(KinForward)->Unit(benchmark::kMillisecond);
