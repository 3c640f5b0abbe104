#include "tpnsi/lattice_spectra.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

void bm_harper_spectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = tpnsi::build_heisenberg_quotient(n);
  for ([[maybe_unused]] auto _ : state) {
    auto spectrum = tpnsi::harper_spectrum(q);
    benchmark::DoNotOptimize(spectrum.block_eigenvalues.data());
  }
}

void bm_spectrum_count_query(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = tpnsi::build_heisenberg_quotient(n);
  const auto spectrum = tpnsi::harper_spectrum(q);
  double lambda = 0.5;
  for ([[maybe_unused]] auto _ : state) {
    long long c = spectrum.count(1.3, 0.7, lambda);
    benchmark::DoNotOptimize(c);
    lambda = lambda < 4.0 ? lambda + 1e-3 : 0.5;
  }
}

void bm_counting_function_dense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = tpnsi::build_heisenberg_quotient(n);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0);
  for ([[maybe_unused]] auto _ : state) {
    auto r = tpnsi::counting_function(op, 1.17);
    benchmark::DoNotOptimize(r.count);
  }
}

void bm_inertia_count(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = tpnsi::build_heisenberg_quotient(n);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0);
  for ([[maybe_unused]] auto _ : state) {
    auto r = tpnsi::inertia_counting_function(op, 1.17);
    benchmark::DoNotOptimize(r.count);
  }
}

void bm_two_param_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> grid{0.5, 1.0, 2.0};
  for ([[maybe_unused]] auto _ : state) {
    auto g = tpnsi::two_param_grid(n, grid, grid, 1.17);
    benchmark::DoNotOptimize(g.values.data());
  }
}

void bm_path_slope_report(benchmark::State& state) {
  const std::vector<int> n_list{8, 12};
  for ([[maybe_unused]] auto _ : state) {
    auto report = tpnsi::lattice_alpha_along_path(n_list, 0.0);
    benchmark::DoNotOptimize(report.slopes.data());
  }
}

BENCHMARK(bm_harper_spectrum)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bm_spectrum_count_query)->Arg(16)->Arg(32);
BENCHMARK(bm_counting_function_dense)->Arg(6)->Arg(10)->Arg(12);
BENCHMARK(bm_inertia_count)->Arg(6)->Arg(10)->Arg(12);
BENCHMARK(bm_two_param_grid)->Arg(4)->Arg(8);
BENCHMARK(bm_path_slope_report);

}  // namespace

BENCHMARK_MAIN();
