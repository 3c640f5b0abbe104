#include "tpnsi/heat_kernel_h3.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

const tpnsi::QuadratureSpec kDefault{};

void bm_theta0(benchmark::State& state) {
  const double t = std::pow(10.0, static_cast<double>(state.range(0)));
  const tpnsi::ScaledMetricPoint p{t, 1.0};
  for ([[maybe_unused]] auto _ : state) {
    auto sample = tpnsi::eval_theta0(p, kDefault);
    benchmark::DoNotOptimize(sample.theta);
  }
}

void bm_theta1(benchmark::State& state) {
  const double t = std::pow(10.0, static_cast<double>(state.range(0)));
  const tpnsi::ScaledMetricPoint p{t, 1.0};
  for ([[maybe_unused]] auto _ : state) {
    auto sample = tpnsi::eval_theta1(p, kDefault);
    benchmark::DoNotOptimize(sample.theta);
  }
}

void bm_series_S(benchmark::State& state) {
  const double v = static_cast<double>(state.range(0));
  for ([[maybe_unused]] auto _ : state) {
    double s = tpnsi::series_S(v, tpnsi::SeriesSign::minus, kDefault);
    benchmark::DoNotOptimize(s);
  }
}

void bm_I1_minus(benchmark::State& state) {
  const double t = std::pow(10.0, static_cast<double>(state.range(0)));
  const tpnsi::ScaledMetricPoint p{t, 1.0};
  for ([[maybe_unused]] auto _ : state) {
    double v = tpnsi::eval_I1(p, tpnsi::SeriesSign::minus, kDefault);
    benchmark::DoNotOptimize(v);
  }
}

void bm_I1_plus(benchmark::State& state) {
  const double t = std::pow(10.0, static_cast<double>(state.range(0)));
  const tpnsi::ScaledMetricPoint p{t, 1.0};
  for ([[maybe_unused]] auto _ : state) {
    double v = tpnsi::eval_I1(p, tpnsi::SeriesSign::plus, kDefault);
    benchmark::DoNotOptimize(v);
  }
}

BENCHMARK(bm_theta0)->DenseRange(0, 8, 2);
BENCHMARK(bm_theta1)->DenseRange(1, 7, 2);
BENCHMARK(bm_series_S)->Arg(1)->Arg(10)->Arg(100);
BENCHMARK(bm_I1_minus)->Arg(1)->Arg(4)->Arg(7);
BENCHMARK(bm_I1_plus)->Arg(1)->Arg(4)->Arg(7);

}  // namespace

BENCHMARK_MAIN();
