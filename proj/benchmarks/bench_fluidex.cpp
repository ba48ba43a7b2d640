#include <benchmark/benchmark.h>

#include "fluidex/bas_dynamics.hpp"
#include "fluidex/exponent_estimator.hpp"
#include "fluidex/le_oracle.hpp"
#include "fluidex/spectral_toolbox.hpp"

using namespace fluidex;

static void BM_BasAdvance(benchmark::State& state) {
  auto f = make_flow(state.range(0) == 2 ? "cellular" : "abc");
  auto samples = sample_admissible(f, SampleClass::Full, 1, 1);
  BasState s = initial_state(samples.front());
  for (auto _ : state) {
    s = advance(f, s, 1.0, 1e-3);
    benchmark::DoNotOptimize(s.beta);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_BasAdvance)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ThetaSup(benchmark::State& state) {
  auto f = make_flow("cellular");
  auto samples = sample_admissible(f, SampleClass::Full, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(theta_sup(f, 5.0, samples));
}
BENCHMARK(BM_ThetaSup)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ApplyB(benchmark::State& state) {
  auto f = make_flow("cellular");
  const int N = static_cast<int>(state.range(0));
  FourierField v(2, N, 2);
  v.comp[1][*v.index_of({1, 0, 0})] = 1.0;
  v.comp[0][*v.index_of({0, 3, 0})] = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(apply_B(f, v).comp[0][0]);
}
BENCHMARK(BM_ApplyB)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_BuildBMatrix(benchmark::State& state) {
  auto f = make_flow("cellular");
  for (auto _ : state) benchmark::DoNotOptimize(build_B_matrix(f, static_cast<int>(state.range(0))).kernel_rank());
}
BENCHMARK(BM_BuildBMatrix)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_LinearizedStep(benchmark::State& state) {
  auto f = make_flow("cellular");
  const int N = static_cast<int>(state.range(0));
  PacketSpec spec;
  spec.x0 = make_vec({0.0, 2.0});
  spec.xi0 = make_vec({1.0, 0.0});
  spec.zeta = 0.9;
  spec.delta = 1.0 / 16;
  const double dt = 0.4 * (kTwoPi / N) / max_speed(f, N);
  PerturbationState s = evolve_linearized(f, initial_packet(spec, N), 0.0, N, dt);
  for (auto _ : state) {
    s = continue_linearized(f, s, dt, dt);
    benchmark::DoNotOptimize(s.t);
  }
}
BENCHMARK(BM_LinearizedStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
