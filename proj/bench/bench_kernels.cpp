// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "ergodic_mi/channel_models.hpp"
#include "ergodic_mi/estimators.hpp"
#include "ergodic_mi/kernels.hpp"
#include "ergodic_mi/rng.hpp"

using namespace ergodic_mi;

namespace {

std::vector<ChannelPair> pairs(std::size_t count, Index n) {
  Rng rng(7);
  std::vector<ChannelPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(iid_gaussian_pair(n, n, 1.0 / (2.0 * n), rng));
  }
  return out;
}

void BM_GramParallel(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(identity_plus_gram(p, 4.0));
}

void BM_GramSerial(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(identity_plus_gram_serial(p, 4.0));
}

void BM_RingGramParallel(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(identity_plus_ring_gram(p, 4.0));
}

void BM_RingGramSerial(benchmark::State& state) {
  const auto p = pairs(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(identity_plus_ring_gram_serial(p, 4.0));
}

// One replication: a short recursive estimate on its own stream.
double replication(std::size_t r) {
  ModelConfig cfg;
  cfg.variant = ModelVariant::kIidGaussian;
  cfg.R = 2;
  cfg.T = 2;
  cfg.seed = substream_seed(1, r);
  ChannelModel model(cfg);
  return recursive_mi(model, 4.0, 2, {.n_steps = 2000, .burn_in = 200}).value;
}

void BM_ReplicationsParallel(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(map_indices(count, 0, replication));
}

void BM_ReplicationsSerial(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(map_indices_serial(count, replication));
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(64)->Arg(256);
BENCHMARK(BM_GramSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_RingGramParallel)->Arg(64)->Arg(256);
BENCHMARK(BM_RingGramSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_ReplicationsParallel)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsSerial)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
