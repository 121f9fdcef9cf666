#include <benchmark/benchmark.h>

#include <random>

#include "hatmatch/scm.hpp"

namespace {

void BM_ScmFit(benchmark::State& state) {
  const auto donors_n = static_cast<std::size_t>(state.range(0));
  std::mt19937 gen(3);
  std::normal_distribution<double> n(10, 4);
  std::vector<std::vector<double>> donors(donors_n, std::vector<double>(6));
  for (auto& d : donors)
    for (auto& v : d) v = n(gen);
  std::vector<double> treated(6);
  for (auto& v : treated) v = n(gen);
  for (auto _ : state) benchmark::DoNotOptimize(hatmatch::scm_fit(treated, donors));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_ScmFit)->RangeMultiplier(4)->Range(8, 512)->Complexity();
