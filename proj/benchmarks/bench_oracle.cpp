#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "signet/evaluation.hpp"
#include "signet/model.hpp"

using namespace signet;

namespace {

ObservationSet observations(std::size_t n, int t) {
  Rng rng(9);
  std::uniform_int_distribution<int> c(0, t);
  ObservationMatrix x(n, t);
  for (std::size_t k = 0; k < pair_count(n); ++k) x.set_at_index(k, c(rng));
  return ObservationSet(std::vector<ObservationMatrix>{x});
}

void BM_BruteForceMarginals(benchmark::State& st) {
  const auto obs = observations(static_cast<std::size_t>(st.range(0)), 20);
  for (auto _ : st) benchmark::DoNotOptimize(eval::brute_force_marginals(obs, {}, 20));
}
BENCHMARK(BM_BruteForceMarginals)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& st) {
  const std::size_t size = static_cast<std::size_t>(st.range(0));
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(size);
  auto labels = std::make_unique<bool[]>(size);
  for (std::size_t k = 0; k < size; ++k) {
    scores[k] = u(rng);
    labels[k] = u(rng) < 0.3;
  }
  for (auto _ : st) benchmark::DoNotOptimize(eval::auc(scores, std::span<const bool>(labels.get(), size)));
}
BENCHMARK(BM_Auc)->Arg(2016)->Arg(32640);

}  // namespace
