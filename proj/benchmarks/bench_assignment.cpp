#include <benchmark/benchmark.h>

#include <random>

#include "hatmatch/assignment.hpp"

namespace {

// Each row keeps its k cheapest of `cols` random columns, as after a k-nearest cut.
void BM_SparseAssignment(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0)), cols = 3 * rows, k = 40;
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<hatmatch::AssignmentEdge> edges;
  for (int r = 0; r < rows; ++r)
    for (int e = 0; e < k; ++e) edges.push_back({r, static_cast<int>(gen() % cols), u(gen)});
  for (auto _ : state) benchmark::DoNotOptimize(hatmatch::min_cost_assignment(rows, cols, edges));
}

}  // namespace

BENCHMARK(BM_SparseAssignment)->Arg(50)->Arg(200)->Arg(1000);
