#pragma once

#include <string>
#include <vector>

#include "hhg/field.hpp"
#include "hhg/material.hpp"
#include "hhg/quantum_light.hpp"
#include "hhg/sbe.hpp"
#include "hhg/spectrum.hpp"
#include "hhg/statistics.hpp"

namespace hhg::runner {

PulseSpec at_intensity(PulseSpec pulse, double intensity_tw_cm2);
PulseSpec at_peak_field(PulseSpec pulse, double field_au);
double intensity_tw_cm2(const PulseSpec& pulse);

struct CoherentRun {
  FieldTrace field;
  SBETrajectory trajectory;
  SpectrumRecord spectrum;  ///< unnormalised
};

CoherentRun run_coherent(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
                         const SpectrumOptions& options);

/// 1 / fundamental peak of the reference, or 1 when the reference is dark.
double reference_normalization(const SpectrumRecord& reference);

/// Husimi-Q average over coherent runs at the quadrature nodes. The BSV scale
/// is the peak field of `pulse`, so the mean intensity equals the pulse's.
struct BsvRun {
  QuadratureRule rule;
  std::vector<SpectrumRecord> node_spectra;  ///< unnormalised
  SpectrumRecord average;                    ///< unnormalised
  double max_population = 0.0;
  double min_population = 0.0;
  double max_purity_excess = 0.0;
};

BsvRun run_bsv(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
               const SpectrumOptions& options, int nodes, double cutoff_sigma, int workers);

struct YieldMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Quadrature mean and shot-to-shot variance of one harmonic's yield.
YieldMoments bsv_yield_moments(const BsvRun& run, int order, double half_width, double normalization);

/// Coherent yields of `order` at amplitudes sigma * factors, with the pulse shape of `pulse`.
YieldMap tabulate_yield_map(const MaterialModel& material, const PulseSpec& pulse, const SolverParams& solver,
                            const SpectrumOptions& options, double sigma, const std::vector<double>& factors,
                            int order, double half_width, double normalization, int workers);

std::vector<double> geometric_points(double lower, double upper, int count);

}  // namespace hhg::runner
