#include <benchmark/benchmark.h>

#include <cmath>

#include "hhg/field.hpp"
#include "hhg/material.hpp"
#include "hhg/quantum_light.hpp"
#include "hhg/sbe.hpp"
#include "hhg/spectrum.hpp"
#include "hhg/statistics.hpp"

namespace {

hhg::PulseSpec pulse(double fwhm_fs, double intensity) {
  hhg::PulseSpec p;
  p.fwhm_fs = fwhm_fs;
  p.peak_intensity_tw_cm2 = intensity;
  return p;
}

void BM_Evolve(benchmark::State& state) {
  hhg::SolverParams params;
  params.k_points = static_cast<int>(state.range(0));
  params.frame = state.range(1) == 0 ? hhg::Frame::moving : hhg::Frame::fixed;
  // The fixed frame's advection stencil limits the field strength.
  const auto trace = hhg::synthesize(pulse(25.0, params.frame == hhg::Frame::moving ? 2.0 : 0.2));
  const auto material = hhg::ln_like();
  for (auto _ : state) benchmark::DoNotOptimize(hhg::evolve(material, trace, params));
  state.SetLabel(params.frame == hhg::Frame::moving ? "moving" : "fixed");
}
BENCHMARK(BM_Evolve)->Args({128, 0})->Args({256, 0})->Args({512, 0})->Args({256, 1})->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> inter(n), intra(n);
  for (std::size_t i = 0; i < n; ++i) {
    inter[i] = std::sin(0.01 * static_cast<double>(i));
    intra[i] = std::cos(0.03 * static_cast<double>(i));
  }
  for (auto _ : state) benchmark::DoNotOptimize(hhg::hhg_spectrum(inter, intra, 0.5, 0.0285));
}
BENCHMARK(BM_Spectrum)->Arg(4096)->Arg(10000)->Arg(65536)->Unit(benchmark::kMicrosecond);

void BM_HusimiQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(hhg::husimi_quadrature({1.0}, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_HusimiQuadrature)->Arg(32)->Arg(64)->Arg(128);

void BM_SampleAmplitudes(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hhg::sample_amplitudes({1.0}, count, 42));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleAmplitudes)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_JointHistogram(benchmark::State& state) {
  const auto e = hhg::sample_amplitudes({1.0}, 200000, 7);
  const auto pump = hhg::BinAxis::log_spaced(1e-3, 30.0, 40);
  const auto harmonic = hhg::BinAxis::log_spaced(1e-15, 1e8, 200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hhg::synthesize_joint_histogram(
        e, [](double x) { return std::pow(x, 10); }, 1.0, {}, pump, harmonic));
  }
}
BENCHMARK(BM_JointHistogram)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
