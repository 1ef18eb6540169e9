#include "ncstein/search.hpp"

#include <benchmark/benchmark.h>

namespace {

ncstein::SearchConfig qiu_config() {
  ncstein::SearchConfig cfg;
  cfg.inequality = ncstein::InequalityId::kQiuS12;
  cfg.p = ncstein::Exponent(1.0);
  cfg.q = ncstein::Exponent(2.0);
  cfg.dim = 8;
  cfg.seq_len = 2;
  cfg.lag = 1;
  cfg.budget = 800;
  cfg.restarts = 8;
  cfg.seed = 3;
  return cfg;
}

void BM_SearchSerial(benchmark::State& state) {
  const auto cfg = qiu_config();
  for (auto _ : state) benchmark::DoNotOptimize(ncstein::estimate_constant_serial(cfg));
}

void BM_SearchParallel(benchmark::State& state) {
  const auto cfg = qiu_config();
  for (auto _ : state) benchmark::DoNotOptimize(ncstein::estimate_constant(cfg));
}

ncstein::OperatorSequence linf_input() {
  auto rng = ncstein::make_rng(11);
  ncstein::OperatorSequence seq;
  for (int n = 0; n < 4; ++n) seq.push_back(ncstein::random_psd(4, rng));
  return seq;
}

void BM_LinfSerial(benchmark::State& state) {
  const auto seq = linf_input();
  ncstein::LinfOptions opts;
  opts.parallel = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ncstein::linf_norm_positive(seq, ncstein::Exponent(2.0), opts));
  }
}

void BM_LinfParallel(benchmark::State& state) {
  const auto seq = linf_input();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ncstein::linf_norm_positive(seq, ncstein::Exponent(2.0)));
  }
}

}  // namespace

BENCHMARK(BM_SearchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinfSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinfParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
