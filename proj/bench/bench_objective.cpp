// Serial reference kernels against the OpenMP kernels on XOR data.

#include <benchmark/benchmark.h>

#include <map>

#include "pauc/gmm.hpp"
#include "pauc/objective.hpp"

namespace {

using namespace pauc;

const Dataset& data(std::size_t n_neg) {
  static std::map<std::size_t, Dataset> cache;
  auto it = cache.find(n_neg);
  if (it == cache.end()) it = cache.emplace(n_neg, synth_xor_gmm(n_neg / 20, n_neg, 0.5, 1)).first;
  return it->second;
}

Scorer scorer_for(int family) {
  switch (family) {
    case 0: return Scorer(LinearShape{2}, {0.5, -0.25});
    case 1: return init_mlp(2, {50}, Activation::Tanh, 3);
    default: return init_gmm_ratio(data(2000), 2, 2, 3);
  }
}

const char* family_name(int family) { return family == 0 ? "linear" : family == 1 ? "mlp50" : "gmm2"; }

template <bool Parallel>
void BM_SurrogateGrad(benchmark::State& state) {
  const Dataset& ds = data(static_cast<std::size_t>(state.range(1)));
  const Scorer sc = scorer_for(static_cast<int>(state.range(0)));
  const PaucRange range(0.0, state.range(2) / 100.0);
  for (auto _ : state) {
    auto r = Parallel ? surrogate_grad(sc, ds, range) : reference::surrogate_grad(sc, ds, range);
    benchmark::DoNotOptimize(r.grad.data());
  }
  state.SetLabel(family_name(static_cast<int>(state.range(0))));
}

template <bool Parallel>
void BM_ScoreRows(benchmark::State& state) {
  const Dataset& ds = data(static_cast<std::size_t>(state.range(1)));
  const Scorer sc = scorer_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? score_rows(sc, ds.negatives()) : reference::score_rows(sc, ds.negatives());
    benchmark::DoNotOptimize(r.data());
  }
  state.SetLabel(family_name(static_cast<int>(state.range(0))));
}

// args: family, n_neg, beta in percent
void grad_args(benchmark::internal::Benchmark* b) {
  for (int family : {0, 1, 2}) {
    for (int n : {2000, 8000}) {
      for (int beta : {10, 100}) b->Args({family, n, beta});
    }
  }
  b->Unit(benchmark::kMillisecond);
}

void score_args(benchmark::internal::Benchmark* b) {
  for (int family : {0, 1, 2}) b->Args({family, 8000});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK_TEMPLATE(BM_SurrogateGrad, false)->Name("surrogate_grad/reference")->Apply(grad_args);
BENCHMARK_TEMPLATE(BM_SurrogateGrad, true)->Name("surrogate_grad/parallel")->Apply(grad_args);
BENCHMARK_TEMPLATE(BM_ScoreRows, false)->Name("score_rows/reference")->Apply(score_args);
BENCHMARK_TEMPLATE(BM_ScoreRows, true)->Name("score_rows/parallel")->Apply(score_args);

BENCHMARK_MAIN();
