// Copyright 2026 The SimplexDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: the closed forms that gate interactive
// use, the samplers behind the Monte-Carlo estimators, and the dense linear
// algebra behind the chain reports.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "simplexdp/accuracy.h"
#include "simplexdp/data.h"
#include "simplexdp/dirichlet.h"
#include "simplexdp/markov.h"
#include "simplexdp/privacy.h"
#include "simplexdp/rng.h"
#include "simplexdp/specfun.h"

namespace {

using namespace simplexdp;

CountVector uniform_vector(int n, std::int64_t N) {
  CountVector q;
  q.n = n;
  q.N = N;
  q.probs.assign(static_cast<std::size_t>(n), 1.0 / n);
  q.eta = 1.0 / n;
  return q;
}

Matrix random_chain(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> entry(0.05, 1.0);
  Matrix P(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& row : P) {
    double total = 0.0;
    for (double& v : row) total += (v = entry(gen));
    for (double& v : row) v /= total;
  }
  return P;
}

void BM_LogGamma(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::log_gamma(x));
    x += 0.37;
    if (x > 500.0) x = 0.1;
  }
}
BENCHMARK(BM_LogGamma);

void BM_EpsilonBound(benchmark::State& state) {
  MechanismConfig cfg = MechanismConfig::validated(20.6, 0.073, 0.0004, 98, 5);
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_bound(cfg));
}
BENCHMARK(BM_EpsilonBound);

void BM_CalibrateK(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_k(3.31, 0.073, 0.0004, 98, 5));
}
BENCHMARK(BM_CalibrateK);

void BM_DirichletSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DirichletParams params = DirichletParams::create(uniform_vector(n, 1000), 50.0);
  RngStream rng{42, 0};
  for (auto _ : state) benchmark::DoNotOptimize(sample(params, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DirichletSample)->Arg(5)->Arg(20)->Arg(63);

void BM_DeltaBound(benchmark::State& state) {
  MechanismConfig cfg = MechanismConfig::validated(20.6, 0.073, 0.0004, 98, 5);
  const std::int64_t samples = state.range(0);
  for (auto _ : state) {
    RngStream rng{42, 1};
    benchmark::DoNotOptimize(delta_bound(cfg, samples, rng));
  }
  state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_DeltaBound)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ExpectedKlExact(benchmark::State& state) {
  CountVector q = uniform_vector(8, 400);
  for (auto _ : state) benchmark::DoNotOptimize(expected_kl_exact(q, 60.0));
}
BENCHMARK(BM_ExpectedKlExact);

void BM_StationaryDistribution(benchmark::State& state) {
  Matrix P = random_chain(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(P));
}
BENCHMARK(BM_StationaryDistribution)->Arg(4)->Arg(16)->Arg(63);

void BM_FundamentalMatrix(benchmark::State& state) {
  Matrix P = random_chain(static_cast<int>(state.range(0)), 11);
  std::vector<double> pi = stationary_distribution(P);
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_matrix(P, pi));
}
BENCHMARK(BM_FundamentalMatrix)->Arg(4)->Arg(16)->Arg(63);

void BM_TauInf(benchmark::State& state) {
  Matrix P = random_chain(static_cast<int>(state.range(0)), 13);
  for (auto _ : state) benchmark::DoNotOptimize(tau_inf(P));
}
BENCHMARK(BM_TauInf)->Arg(4)->Arg(16)->Arg(63);

}  // namespace

BENCHMARK_MAIN();
