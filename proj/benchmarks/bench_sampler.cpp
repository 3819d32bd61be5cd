#include <benchmark/benchmark.h>

#include "signet/model.hpp"
#include "signet/sampler.hpp"
#include "signet/synthetic.hpp"

using namespace signet;

namespace {

synth::Instance instance(std::size_t n, int periods) {
  synth::SynthConfig cfg;
  cfg.n = n;
  cfg.periods = periods;
  cfg.seed = 17;
  return synth::generate_instance(cfg);
}

void BM_LogPosterior(benchmark::State& st) {
  const auto inst = instance(static_cast<std::size_t>(st.range(0)), 1);
  ModelState s{inst.network, inst.periods, 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(log_posterior(s, inst.observations, {}));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(pair_count(inst.observations.n())));
}
BENCHMARK(BM_LogPosterior)->Arg(16)->Arg(64)->Arg(256);

void BM_Sweep(benchmark::State& st) {
  const auto inst = instance(static_cast<std::size_t>(st.range(0)), static_cast<int>(st.range(1)));
  SamplerConfig cfg;
  Rng rng(3);
  Chain chain(inst.observations, cfg, initial_state(inst.observations, cfg), rng);
  for (auto _ : st) chain.sweep();
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Sweep)->Args({16, 1})->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMicrosecond);

void BM_EdgeFlipRatio(benchmark::State& st) {
  const auto inst = instance(64, 1);
  SamplerConfig cfg;
  Rng rng(5);
  Chain chain(inst.observations, cfg, initial_state(inst.observations, cfg), rng);
  std::size_t k = 0;
  const std::size_t pairs = pair_count(64);
  for (auto _ : st) {
    benchmark::DoNotOptimize(chain.edge_flip_log_ratio(k, Sign::positive));
    k = (k + 1) % pairs;
  }
}
BENCHMARK(BM_EdgeFlipRatio);

void BM_TemperedSweeps(benchmark::State& st) {
  const auto inst = instance(32, 1);
  SamplerConfig cfg;
  cfg.sweeps = 100;
  cfg.burn_in = 50;
  cfg.smart_init = false;
  const TemperatureLadder ladder;
  for (auto _ : st) {
    Rng rng(11);
    benchmark::DoNotOptimize(run_tempered(inst.observations, cfg, ladder, rng).size());
  }
}
BENCHMARK(BM_TemperedSweeps)->Unit(benchmark::kMillisecond);

}  // namespace
