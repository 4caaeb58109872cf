#include <benchmark/benchmark.h>

#include <random>

#include "nhchain/exact_sum.hpp"
#include "nhchain/mc.hpp"
#include "nhchain/model.hpp"
#include "nhchain/spectral.hpp"

using namespace nhchain;

namespace {

ModelParams params_at(int L, double beta = 10.0) {
  ModelParams p;
  p.L = L;
  p.U_re = 0.4;
  p.J = 0.1;
  p.beta = beta;
  return p;
}

SpinConfig random_config(int L, std::mt19937_64& rng) {
  SpinConfig c = uniform_config(L, +1);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < L; ++i)
    if (coin(rng)) c.x[i] = -1;
  return c;
}

// Dense non-symmetric eigensolve: the cost that makes the slow MC path O(L^3)
// per proposal and caps direct domain-wall scans.
void BM_eigensolve(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const ModelParams p = params_at(L);
  const HoppingMatrix h = build_hopping(p, random_config(L, rng));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(h).eigs);
  state.SetComplexityN(L);
}
BENCHMARK(BM_eigensolve)->RangeMultiplier(2)->Range(16, 256)->Complexity();

// Similarity-reduced spectrum: the O(L) replacement at t' = 0 under PBC.
void BM_hn_spectrum(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const ModelParams p = params_at(L);
  for (auto _ : state) benchmark::DoNotOptimize(hn_spectrum(L, L / 3, p).eigs);
  state.SetComplexityN(L);
}
BENCHMARK(BM_hn_spectrum)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

// One fast-path Metropolis sweep (table lookups, no eigensolves).
void BM_sweep_fast(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Chain chain(params_at(L), 7, /*use_fast_path=*/true);
  for (auto _ : state) chain.sweep();
  state.SetItemsProcessed(state.iterations() * L);
}
BENCHMARK(BM_sweep_fast)->Arg(32)->Arg(70)->Arg(128);

// One slow-path sweep (an eigensolve per proposal).
void BM_sweep_slow(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Chain chain(params_at(L), 7, /*use_fast_path=*/false);
  for (auto _ : state) chain.sweep();
  state.SetItemsProcessed(state.iterations() * L);
}
BENCHMARK(BM_sweep_slow)->Arg(16)->Arg(32);

// Full measurement (correlation matrix, velocity, correlators).
void BM_measure(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Chain chain(params_at(L), 7, /*use_fast_path=*/true);
  chain.sweep();
  for (auto _ : state) benchmark::DoNotOptimize(chain.measure());
}
BENCHMARK(BM_measure)->Arg(32)->Arg(70);

// Exact class summation over (n_minus, wall-count) classes.
void BM_exact_observables(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const ModelParams p = params_at(L);
  for (auto _ : state) benchmark::DoNotOptimize(exact_observables(p));
  state.SetComplexityN(L);
}
BENCHMARK(BM_exact_observables)->Arg(32)->Arg(70)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
