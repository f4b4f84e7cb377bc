// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "fairsmile/hedge.hpp"
#include "fairsmile/reference.hpp"
#include "fairsmile/smile.hpp"

using namespace fairsmile;

namespace {

const GaarchParams kGaarch{0.01, 0.9, 0.1};

void BM_SimulateGaarch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_gaarch(kGaarch, 20, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateGaarchReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::simulate_gaarch(kGaarch, 20, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> samples(std::size_t n) {
  return ensemble_samples(simulate_gaussian(0.01, 1, n, 2), 1).samples;
}

void BM_KernelProfile(benchmark::State& state) {
  const auto u = samples(static_cast<std::size_t>(state.range(0)));
  const auto k = default_kernel_config(u.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernel_density_profile(u, k.delta_grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KernelProfileReference(benchmark::State& state) {
  const auto u = samples(static_cast<std::size_t>(state.range(0)));
  const auto k = default_kernel_config(u.size());
  for (auto _ : state) benchmark::DoNotOptimize(reference::kernel_density_profile(u, k.delta_grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_HedgedPrice(benchmark::State& state) {
  const auto e = simulate_gaarch(kGaarch, 20, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(hedged_price(e, ExoticPayoff::binary(), HedgeConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_HedgedPriceReference(benchmark::State& state) {
  const auto e = simulate_gaarch(kGaarch, 20, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::hedged_price(e, ExoticPayoff::binary(), HedgeConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

double sample_mean(std::span<const double> s) {
  double t = 0.0;
  for (double x : s) t += x;
  return t / static_cast<double>(s.size());
}

void BM_Bootstrap(benchmark::State& state) {
  const auto u = samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_se(sample_mean, u, BootstrapOptions{}));
}

void BM_BootstrapReference(benchmark::State& state) {
  const auto u = samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::bootstrap_se(sample_mean, u, BootstrapOptions{}));
  }
}

}  // namespace

BENCHMARK(BM_SimulateGaarch)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateGaarchReference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelProfile)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelProfileReference)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HedgedPrice)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HedgedPriceReference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapReference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
