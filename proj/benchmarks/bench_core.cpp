#include <benchmark/benchmark.h>

#include "apmarkov/absorbed.hpp"
#include "apmarkov/fleming_viot.hpp"
#include "apmarkov/ou.hpp"
#include "apmarkov/quadrature.hpp"
#include "apmarkov/rng.hpp"

using namespace apmarkov;

static void BM_StreamNormal(benchmark::State& state) {
  Stream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_StreamNormal);

static void BM_StreamUniform(benchmark::State& state) {
  Stream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_StreamUniform);

static void BM_OuStep(benchmark::State& state) {
  const TimeGrid grid(0.0, 1e-2, 1000);
  const auto step = ou_stepper(default_ou_spec(), false, grid);
  Stream rng(2, 0);
  double x = 0.0;
  std::size_t k = 0;
  for (auto _ : state) {
    x = step(k, grid.time(k), grid.time(k + 1), x, rng);
    k = (k + 1) % grid.n_steps;
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_OuStep);

static void BM_TransitionParams(benchmark::State& state) {
  const auto spec = default_ou_spec();
  for (auto _ : state) benchmark::DoNotOptimize(transition_params(spec.lambda, 0.0, 1.0));
}
BENCHMARK(BM_TransitionParams);

// Time per particle-step of a Fleming-Viot run on the unit interval.
static void BM_FlemingViotStep(benchmark::State& state) {
  FlemingViotOptions o;
  o.n_particles = static_cast<std::size_t>(state.range(0));
  o.t_end = 1.0;
  const auto h = TimeFunction::constant(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fleming_viot(h, o).absorptions);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(o.n_particles) * 1000);
}
BENCHMARK(BM_FlemingViotStep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_AdaptiveQuadrature(benchmark::State& state) {
  const auto f = TimeFunction::parse("1 + 0.5*sin(2*pi*t)");
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, 0.0, 10.0));
}
BENCHMARK(BM_AdaptiveQuadrature);
BENCHMARK_MAIN();
