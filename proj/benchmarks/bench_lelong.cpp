#include <benchmark/benchmark.h>

#include "lelong/analysis.hpp"
#include "lelong/identity_suite.hpp"
#include "lelong/mass_engine.hpp"

using namespace lelong;

namespace {

const Domain kC2{1.0, 2};

ModelCurrent worked_example(double eps) {
  return ModelCurrent(CurrentKind::Subspace, kC2, 1, RadialDensity({{1.0, eps}, {-1.0, 0.0}}));
}

EvalOptions with_engine(Engine e, long samples = 100000) {
  EvalOptions o;
  o.engine = e;
  o.mc.samples = samples;
  o.mc.threads = 1;
  return o;
}

}  // namespace

static void BM_NuClosed(benchmark::State& state) {
  const auto T = worked_example(0.5);
  const auto phi = Weight::isotropic_power(kC2, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(nu_value(T, phi, 0.01).value);
}
BENCHMARK(BM_NuClosed);

static void BM_NuQuadrature(benchmark::State& state) {
  const auto T = worked_example(0.5);
  const auto phi = Weight::isotropic_power(kC2, 2.0);
  const auto o = with_engine(Engine::Quad);
  for (auto _ : state) benchmark::DoNotOptimize(nu_value(T, phi, 0.01, o).value);
}
BENCHMARK(BM_NuQuadrature);

static void BM_DdcQuadrature(benchmark::State& state) {
  const auto T = worked_example(0.5);
  const auto phi = Weight::isotropic_power(kC2, 1.0);
  const auto o = with_engine(Engine::Quad);
  for (auto _ : state) benchmark::DoNotOptimize(nu_ddc(T, phi, 0.01, o).value);
}
BENCHMARK(BM_DdcQuadrature);

static void BM_NuMonteCarlo(benchmark::State& state) {
  const auto T = worked_example(1.0);
  const auto psi = Weight::anisotropic(kC2, {1.0, 2.0});
  const auto o = with_engine(Engine::MonteCarlo, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nu_value(T, psi, 0.1, o).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NuMonteCarlo)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ProfileAndLimit(benchmark::State& state) {
  const auto T = worked_example(0.5);
  const auto phi = Weight::isotropic_power(kC2, 1.0);
  for (auto _ : state) {
    const auto prof = nu_profile(T, phi, 1e-6, 1e-1, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(estimate_limit(prof).value);
  }
}
BENCHMARK(BM_ProfileAndLimit)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_ConditionC(benchmark::State& state) {
  const auto T = worked_example(0.5);
  const auto phi = Weight::isotropic_power(kC2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(check_condition_C(T, phi, {}, true).verdict);
}
BENCHMARK(BM_ConditionC)->Unit(benchmark::kMicrosecond);

static void BM_DefaultPanel(benchmark::State& state) {
  const auto cases = default_panel();
  for (auto _ : state) benchmark::DoNotOptimize(run_panel(cases).size());
}
BENCHMARK(BM_DefaultPanel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
