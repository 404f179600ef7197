#include <benchmark/benchmark.h>

#include "tmbae/conditional.hpp"
#include "tmbae/sensing.hpp"
#include "tmbae/spectra.hpp"
#include "tmbae/trajectory.hpp"

using namespace tmbae;

namespace {

DerivedParams reference() {
  DimensionlessSpec ds;
  ds.Omega_over_gamma = 200.0;
  return derive(from_dimensionless(ds));
}

constexpr ModelConfig kSym{ModelTag::Symmetric, Basis::Rotated};

void BM_SolveCare(benchmark::State& state) {
  const DerivedParams dp = reference();
  const SMECoefficients sme = sme_coefficients(dp, kSym);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_care(sme).Sigma);
  }
}
BENCHMARK(BM_SolveCare);

void BM_Susceptibility(benchmark::State& state) {
  const DerivedParams dp = reference();
  const LinearModel m = build(dp, kSym);
  double w = 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(susceptibility(m, w));
    w += 1e-6;
  }
}
BENCHMARK(BM_Susceptibility);

void BM_SpectrumGrid(benchmark::State& state) {
  const DerivedParams dp = reference();
  const LinearModel m = build(dp, kSym);
  const auto grid = default_grid(m, dp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measured_spectrum(m, dp, grid));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_SpectrumGrid);

void BM_AddedNoise(benchmark::State& state) {
  const DerivedParams dp = reference();
  const LinearModel m = build(dp, kSym);
  for (auto _ : state) {
    benchmark::DoNotOptimize(added_noise(dp, m, 0.0).total);
  }
}
BENCHMARK(BM_AddedNoise);

void BM_TrajectorySteps(benchmark::State& state) {
  const DerivedParams dp = reference();
  const CareResult care = solve_care(sme_coefficients(dp, kSym));
  TrajectoryOptions opts;
  opts.duration = 2.0 / dp.gamma;
  std::uint64_t seed = 1;
  std::size_t steps = 0;
  for (auto _ : state) {
    opts.seed = ++seed;
    const TrajectoryRecord rec = simulate(dp, kSym, care.Sigma, opts);
    steps += rec.summary.steps;
    benchmark::DoNotOptimize(rec.summary.truth_x2);
  }
  state.SetItemsProcessed(static_cast<int64_t>(steps));
}
BENCHMARK(BM_TrajectorySteps);

}  // namespace

BENCHMARK_MAIN();
