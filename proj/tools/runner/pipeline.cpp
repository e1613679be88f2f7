#include "pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"
#include "parallel.hpp"

namespace hhg::runner {

PulseSpec at_intensity(PulseSpec pulse, double intensity) {
  pulse.peak_intensity_tw_cm2 = intensity;
  pulse.peak_field_v_per_angstrom.reset();
  return pulse;
}

PulseSpec at_peak_field(PulseSpec pulse, double field_au) {
  pulse.peak_field_v_per_angstrom = units::field_to_v_per_angstrom(field_au);
  pulse.peak_intensity_tw_cm2.reset();
  return pulse;
}

double intensity_tw_cm2(const PulseSpec& pulse) {
  if (pulse.peak_intensity_tw_cm2) return *pulse.peak_intensity_tw_cm2;
  return peak_field_to_intensity(*pulse.peak_field_v_per_angstrom);
}

CoherentRun run_coherent(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
                         const SpectrumOptions& options) {
  CoherentRun run;
  run.field = synthesize(pulse);
  run.trajectory = evolve(material, run.field, solver);
  run.spectrum = hhg_spectrum(run.trajectory.interband, run.trajectory.intraband, run.trajectory.dt,
                              run.field.carrier_frequency, options);
  run.spectrum.source.material = material.name;
  run.spectrum.source.peak_field = run.field.peak_field;
  run.spectrum.source.fwhm_fs = pulse.fwhm_fs;
  return run;
}

double reference_normalization(const SpectrumRecord& reference) {
  const double peak = fundamental_peak(reference);
  return peak > 0.0 ? 1.0 / peak : 1.0;
}

BsvRun run_bsv(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
               const SpectrumOptions& options, int nodes, double cutoff_sigma, int workers) {
  BsvRun out;
  const double sigma = peak_field_au(pulse);
  if (!(sigma > 0.0)) {
    // Dark pulse: every node sits at zero field, so one run stands for all.
    auto dark = run_coherent(material, pulse, solver, options);
    out.rule.scale = 0.0;
    out.average = dark.spectrum;
    out.average.source.quadrature_nodes = nodes;
    out.max_population = dark.trajectory.max_population;
    out.min_population = dark.trajectory.min_population;
    out.max_purity_excess = dark.trajectory.max_purity_excess;
    return out;
  }
  out.rule = husimi_quadrature(AmplitudeDistribution{sigma}, nodes, cutoff_sigma);
  out.node_spectra.resize(out.rule.size());
  std::vector<double> population(out.rule.size()), lowest(out.rule.size()), purity(out.rule.size());
  SolverParams quiet = solver;
  quiet.snapshot_stride = 0;
  parallel_for(out.rule.size(), workers, [&](std::size_t j) {
    auto run = run_coherent(material, at_peak_field(pulse, out.rule.nodes[j]), quiet, options);
    run.spectrum.source.peak_field = out.rule.nodes[j];
    population[j] = run.trajectory.max_population;
    lowest[j] = run.trajectory.min_population;
    purity[j] = run.trajectory.max_purity_excess;
    out.node_spectra[j] = std::move(run.spectrum);
  });
  out.max_population = *std::max_element(population.begin(), population.end());
  out.min_population = *std::min_element(lowest.begin(), lowest.end());
  out.max_purity_excess = *std::max_element(purity.begin(), purity.end());
  out.average = bsv_average(out.node_spectra, out.rule);
  out.average.source.fwhm_fs = pulse.fwhm_fs;
  return out;
}

YieldMoments bsv_yield_moments(const BsvRun& run, int order, double half_width, double normalization) {
  if (run.node_spectra.empty()) return {normalization * harmonic_yield(run.average, order, half_width), 0.0};
  double mean = 0.0, second = 0.0;
  for (std::size_t j = 0; j < run.node_spectra.size(); ++j) {
    const double y = normalization * harmonic_yield(run.node_spectra[j], order, half_width);
    mean += run.rule.weights[j] * y;
    second += run.rule.weights[j] * y * y;
  }
  return {mean, std::max(0.0, second - mean * mean)};
}

YieldMap tabulate_yield_map(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
                            const SpectrumOptions& options, double sigma, const std::vector<double>& factors,
                            int order, double half_width, double normalization, int workers) {
  std::vector<double> amplitudes(factors.size()), yields(factors.size());
  SolverParams quiet = solver;
  quiet.snapshot_stride = 0;
  parallel_for(factors.size(), workers, [&](std::size_t i) {
    amplitudes[i] = sigma * factors[i];
    const auto run = run_coherent(material, at_peak_field(pulse, amplitudes[i]), quiet, options);
    yields[i] = normalization * harmonic_yield(run.spectrum, order, half_width);
  });
  return YieldMap(std::move(amplitudes), std::move(yields));
}

std::vector<double> geometric_points(double lower, double upper, int count) {
  if (count < 2 || !(lower > 0.0) || !(upper > lower)) throw DomainError("need count >= 2 and 0 < lower < upper");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = lower * std::pow(upper / lower, static_cast<double>(i) / (count - 1));
  out.back() = upper;
  return out;
}

}  // namespace hhg::runner
