#include <benchmark/benchmark.h>

#include "blindmimo/blind_ideal.hpp"
#include "blindmimo/blind_onebit.hpp"
#include "blindmimo/channel.hpp"
#include "blindmimo/crb.hpp"
#include "blindmimo/txrx.hpp"

using namespace blindmimo;

namespace {

ArrayGeometry ula(int n, double b, double fc = 60.5e9) {
  ArrayGeometry g;
  g.n1 = n;
  g.bandwidth_hz = b;
  g.carrier_hz = fc;
  return g;
}

RxBlock make_block(const Dictionary& dict, int K, double rho, Rng& rng) {
  const ChannelRealization chan = draw_channel(dict, K, 3, false, rng);
  const auto H = exact_transfer(chan, dict);
  const SymbolBlock sym = draw_symbols(K, dict.T, rho, SymbolDistribution::Gaussian, rng);
  RxBlock rx = simulate_rx(H, sym, rng, 1.0, dict.T_D);
  rx.dims.K = K;
  rx.rho = rho;
  return rx;
}

}  // namespace

static void BM_BuildDictionaryWideband(benchmark::State& state) {
  const ArrayGeometry g = ula(32, 7e9);
  for (auto _ : state) benchmark::DoNotOptimize(build_dictionary(g, 128, 5));
}
BENCHMARK(BM_BuildDictionaryWideband);

static void BM_GradientNarrowband(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 0.0), 1000, 0);
  Rng rng(1);
  const RxBlock rx = make_block(dict, 2, 0.3, rng);
  MatrixXcd s(dict.P(), 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < dict.P(); ++i) s(i, j) = rng.cgaussian();
  for (auto _ : state) benchmark::DoNotOptimize(likelihood_gradient(s, rx, dict, 0.3));
}
BENCHMARK(BM_GradientNarrowband);

static void BM_GradientWideband(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 7e9), 128, 5);
  Rng rng(2);
  const RxBlock rx = make_block(dict, 2, 10.0, rng);
  MatrixXcd s(dict.P(), 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < dict.P(); ++i) s(i, j) = rng.cgaussian();
  for (auto _ : state) benchmark::DoNotOptimize(likelihood_gradient(s, rx, dict, 10.0));
}
BENCHMARK(BM_GradientWideband);

static void BM_SubspaceInitNarrowband(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 0.0), 1000, 0);
  Rng rng(3);
  const RxBlock rx = make_block(dict, 2, 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(subspace_init(rx, dict, 0.3, 2));
}
BENCHMARK(BM_SubspaceInitNarrowband);

static void BM_QuantizeBlock(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 0.0), 1000, 0);
  Rng rng(4);
  const RxBlock rx = make_block(dict, 2, 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(quantize_onebit(rx));
}
BENCHMARK(BM_QuantizeBlock);

static void BM_EmIterationNarrowband(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 0.0), 1000, 0);
  Rng rng(5);
  const RxBlock rxq = quantize_onebit(make_block(dict, 2, 0.3, rng));
  const QuantizedCovariance c = sample_quantized_autocorr(*rxq.r_time, 0);
  MatrixXcd s(dict.P(), 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < dict.P(); ++i) s(i, j) = 0.1 * rng.cgaussian();
  for (auto _ : state) {
    const auto phi = estep_cov(c, s, dict, 0.3);
    benchmark::DoNotOptimize(em_gradient(s, {phi[0]}, dict, 0.3));
  }
}
BENCHMARK(BM_EmIterationNarrowband);

static void BM_FisherIdealNarrowband(benchmark::State& state) {
  const Dictionary dict = build_dictionary(ula(32, 0.0), 1000, 0);
  Rng rng(6);
  const ChannelRealization chan = draw_channel(dict, 2, 3, false, rng);
  const auto H = exact_transfer(chan, dict);
  for (auto _ : state) benchmark::DoNotOptimize(fisher_ideal(H, dict, 0.3));
}
BENCHMARK(BM_FisherIdealNarrowband);

BENCHMARK_MAIN();
