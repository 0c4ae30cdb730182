// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "rcl/estimators.hpp"
#include "rcl/presets.hpp"
#include "rcl/samplers.hpp"
#include "rcl/spectral.hpp"

namespace {

rcl::ModelSpec chain(std::int64_t n) {
  return rcl::anderson_1d(static_cast<std::size_t>(n), 0.1, rcl::PotentialDistribution::uniform(0.0, 1.0));
}

void BM_Eigendecompose(benchmark::State& state) {
  const rcl::ModelSpec model = chain(state.range(0));
  rcl::Rng rng(1);
  const rcl::Hamiltonian h = rcl::assemble_hamiltonian(model, model.sample_potential(rng));
  for (auto _ : state) benchmark::DoNotOptimize(rcl::eigendecompose(h));
}
BENCHMARK(BM_Eigendecompose)->RangeMultiplier(4)->Range(8, 512);

void BM_ResolventColumn(benchmark::State& state) {
  const rcl::ModelSpec model = chain(state.range(0));
  rcl::Rng rng(2);
  const rcl::Hamiltonian h0 = rcl::assemble_zeroed(model, model.sample_potential(rng), 0);
  for (auto _ : state) benchmark::DoNotOptimize(rcl::resolvent_column(h0, 0.4321, 0));
}
BENCHMARK(BM_ResolventColumn)->RangeMultiplier(4)->Range(8, 512);

void BM_SampleMu1(benchmark::State& state) {
  const rcl::ModelSpec model = chain(state.range(0));
  rcl::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(rcl::sample_mu1(model, rng));
}
BENCHMARK(BM_SampleMu1)->Arg(8)->Arg(64)->Arg(200);

void BM_SampleMu2(benchmark::State& state) {
  const rcl::ModelSpec model = chain(state.range(0));
  rcl::Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(rcl::sample_mu2(model, rng));
}
BENCHMARK(BM_SampleMu2)->Arg(8)->Arg(64)->Arg(200);

// Full identity check at a fixed budget; one worker so timings compare.
void BM_RnIdentity(benchmark::State& state) {
  const rcl::ModelSpec model = chain(8);
  const auto fs = rcl::default_test_functions(8);
  const rcl::RunOptions opts{rcl::StreamFactory(5), 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rcl::rn_identity_report(model, fs, static_cast<std::size_t>(state.range(0)), opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_RnIdentity)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
