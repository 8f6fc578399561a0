// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/monte_carlo.hpp>
#include <irsmimo/outage_dmt.hpp>
#include <irsmimo/phase_optimizer.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace irsmimo;

Scenario make_scenario(int m, int n, int l, double mu, double rho) {
  CorrelationSet corr(exponential_correlation(n, mu).cast<std::complex<double>>(),
                      exponential_correlation(l, mu).cast<std::complex<double>>(),
                      exponential_correlation(l, mu).cast<std::complex<double>>(),
                      exponential_correlation(m, mu).cast<std::complex<double>>());
  return Scenario(SystemDims(m, n, l), std::move(corr), PhaseShifts::uniform_ramp(l), rho);
}

void BM_SolveCanonical(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const Scenario sc = make_scenario(4, 4, l, 0.5, 10.0);
  const auto sp = sc.spectra();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_canonical(sp, sc.dims, sc.rho_eff));
  }
}
BENCHMARK(BM_SolveCanonical)->Arg(8)->Arg(32)->Arg(128);

void BM_GaussianMi(benchmark::State& state) {
  const Scenario sc = make_scenario(4, 4, 32, 0.5, 10.0);
  const auto sp = sc.spectra();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian_mi(sp, sc.dims, sc.rho_eff));
  }
}
BENCHMARK(BM_GaussianMi);

void BM_MonteCarloDraw(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const Scenario sc = make_scenario(4, 4, l, 0.5, 10.0);
  const MiSampler sampler(sc);
  std::uint64_t idx = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw(1, idx++));
  }
}
BENCHMARK(BM_MonteCarloDraw)->Arg(8)->Arg(32)->Arg(128);

void BM_Gradient(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const Scenario sc = make_scenario(4, 4, l, 0.8, 10.0);
  const Vec theta = PhaseShifts::uniform_ramp(l).theta();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(sc, theta, 4.0));
  }
}
BENCHMARK(BM_Gradient)->Arg(8)->Arg(32);

void BM_FiniteSnrDmt(benchmark::State& state) {
  const Scenario sc = make_scenario(4, 4, 2, 0.5, 10.0);
  const auto sp = sc.spectra();
  for (auto _ : state) {
    benchmark::DoNotOptimize(finite_snr_dmt(1.0, sc.rho_eff, sp, sc.dims));
  }
}
BENCHMARK(BM_FiniteSnrDmt);

}  // namespace

BENCHMARK_MAIN();
