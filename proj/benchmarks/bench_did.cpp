#include <benchmark/benchmark.h>

#include "hatmatch/did.hpp"
#include "hatmatch/synthgen.hpp"

namespace {

void BM_TwfeDid(benchmark::State& state) {
  hatmatch::PlantedPanelConfig c;
  c.n_treated = static_cast<int>(state.range(0));
  c.controls = 3;
  c.effects.assign(9, 2.0);
  c.sigma = 1.0;
  const auto obs = hatmatch::planted_did_panel(c);
  for (auto _ : state) benchmark::DoNotOptimize(hatmatch::twfe_did(obs));
  state.counters["rows"] = static_cast<double>(obs.size());
}

void BM_EventStudy(benchmark::State& state) {
  hatmatch::PlantedPanelConfig c;
  c.n_treated = static_cast<int>(state.range(0));
  c.effects = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};
  const auto obs = hatmatch::planted_did_panel(c);
  for (auto _ : state) benchmark::DoNotOptimize(hatmatch::event_study(obs));
}

}  // namespace

BENCHMARK(BM_TwfeDid)->Arg(40)->Arg(200)->Arg(1000);
BENCHMARK(BM_EventStudy)->Arg(40)->Arg(200);
