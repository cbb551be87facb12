// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "relaylab/dof_calculus.hpp"
#include "relaylab/ia_scheme.hpp"
#include "relaylab/simulator.hpp"

using namespace relaylab;

static void BM_BuildBeamformers(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto r = channel::sample_realization(1, true, 2 * M);
  const auto up = channel::extend_uplink(r, 0, M);
  const auto down = channel::extend_downlink(r, 1, M);
  for (auto _ : state) {
    const auto v11 = ia::initial_beamformer(ia::source_recursion_diagonal(up), ia::InitPolicy::equilibrated);
    const auto vR = ia::initial_beamformer(ia::relay_recursion_diagonal(down), ia::InitPolicy::equilibrated);
    benchmark::DoNotOptimize(ia::build_relay_beamformers(ia::build_source_beamformers(up, v11), down, vR));
  }
}
BENCHMARK(BM_BuildBeamformers)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_VertexEnumeration(benchmark::State& state) {
  auto sys = dof::noncaching_outer_bound_system();
  for (int i = 0; i < 4; ++i) {
    RationalVector e(4, Rational(0));
    e[i] = Rational(1);
    sys.add(e, Rational(1));
  }
  for (auto _ : state) benchmark::DoNotOptimize(dof::max_sum(sys));
}
BENCHMARK(BM_VertexEnumeration);

static void BM_SymmetricTrial(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.M = static_cast<int>(state.range(0));
  cfg.trials = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(cfg));
}
BENCHMARK(BM_SymmetricTrial)->Arg(1)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
