#include <benchmark/benchmark.h>

#include <random>

#include "aim/attribution.hpp"
#include "aim/kernels/kernels.hpp"
#include "aim/synth.hpp"

namespace {

using namespace aim;

Dataset bench_data(std::size_t n) {
  synth::SynthConfig cfg;
  cfg.n_per_group = n / 2;
  cfg.seed = 3;
  return synth::inject_group_bias(synth::generate_base(cfg), cfg).data;
}

const ComparabilityConfig kCfg{};

void BM_GraphSerial(benchmark::State& state) {
  const auto d = bench_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::comparability_graph(d, kCfg));
}

void BM_GraphOmp(benchmark::State& state) {
  const auto d = bench_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::comparability_graph(d, kCfg, true));
}

template <class Fn>
void run_fixed_point(benchmark::State& state, Fn fn) {
  const auto d = bench_data(state.range(0));
  const auto w = symmetric_normalize(build_comparability_graph(d, kCfg));
  RealMatrix q(d.size(), d.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn(w.weights, 0.1, 1e-10, 10000, q));
    benchmark::ClobberMemory();
  }
}

void BM_FixedPointSerial(benchmark::State& state) { run_fixed_point(state, kernels::serial::rwr_fixed_point); }
void BM_FixedPointOmp(benchmark::State& state) { run_fixed_point(state, kernels::omp::rwr_fixed_point); }

template <class Cred, class Bias>
void run_sums(benchmark::State& state, Cred cred, Bias bias) {
  const auto d = bench_data(state.range(0));
  const auto q = compute_similarity(d, AttributionOptions{});
  const auto c = cred(d.labels(), d.groups(), q);
  std::vector<double> weight(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) weight[i] = c.numerator[i] / c.denominator[i];
  for (auto _ : state) {
    benchmark::DoNotOptimize(cred(d.labels(), d.groups(), q));
    benchmark::DoNotOptimize(bias(d.labels(), d.groups(), weight, q));
  }
}

void BM_SumsSerial(benchmark::State& state) {
  run_sums(state, kernels::serial::credibility_sums, kernels::serial::bias_sums);
}
void BM_SumsOmp(benchmark::State& state) { run_sums(state, kernels::omp::credibility_sums, kernels::omp::bias_sums); }

}  // namespace

BENCHMARK(BM_GraphSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphOmp)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FixedPointSerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FixedPointOmp)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SumsSerial)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SumsOmp)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
