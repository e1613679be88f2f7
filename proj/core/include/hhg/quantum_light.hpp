#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "hhg/spectrum.hpp"

namespace hhg {

/// Single-mode squeezed vacuum, parametrised by the squeeze parameter r with
/// <N> = sinh^2 r.
class SqueezedVacuumState {
 public:
  static SqueezedVacuumState from_squeeze_parameter(double r);
  static SqueezedVacuumState from_mean_photon_number(double mean);

  double squeeze_parameter() const noexcept { return r_; }
  double mean_photon_number() const;

 private:
  explicit SqueezedVacuumState(double r) : r_(r) {}
  double r_;
};

/// Exact photon-number probability: zero for odd N,
/// (2m)! / (2^m m!)^2 tanh^{2m} r / cosh r for N = 2m.
double photon_probability(const SqueezedVacuumState& state, std::int64_t photons);

/// P(0..max_photons) by the exact two-term recurrence.
std::vector<double> photon_distribution(const SqueezedVacuumState& state, std::int64_t max_photons);

/// Continuous-N density exp(-N / 2<N>) / sqrt(2 pi N <N>) for <N> >> 1.
/// N <= 0 raises DomainError.
double macroscopic_energy_pdf(const SqueezedVacuumState& state, double photons);
/// Cumulative of the density above, erf(sqrt(N / 2<N>)).
double macroscopic_energy_cdf(const SqueezedVacuumState& state, double photons);

enum class LightStatistics { bsv, thermal, coherent };

LightStatistics parse_statistics(std::string_view name);

/// Normalised n-th order intensity correlation: (2n-1)!! for bright squeezed
/// vacuum, n! for thermal light and 1 for coherent light. n = 0 is a DomainError.
double correlation_g(int n, LightStatistics statistics);

/// Husimi-Q amplitude density of BSV, Q(e) = 2 / sqrt(2 pi s^2) exp(-e^2 / 2 s^2)
/// on e >= 0. The scale s is also the rms amplitude (<e^2> = s^2).
struct AmplitudeDistribution {
  double scale = 0.0;

  double density(double amplitude) const;
};

/// Discretisation of integrals against Q: sum_j w_j g(e_j) ~ int Q(e) g(e) de.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  ///< sum to one
  double scale = 0.0;
  double cutoff = 0.0;  ///< in units of scale

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

inline constexpr int default_quadrature_nodes = 32;

/// 5 + sqrt(M / 2) scales: wide enough that the truncated tail of e^{2n} Q
/// stays below 1e-6 for every n <= M / 4.
double default_quadrature_cutoff(int count);

/// Gauss-Legendre on [0, cutoff * s] with Q folded into the weights. A
/// cutoff of 0 selects default_quadrature_cutoff(count).
QuadratureRule husimi_quadrature(const AmplitudeDistribution& distribution, int count = default_quadrature_nodes,
                                 double cutoff = 0.0);

/// sum_j w_j g(e_j)
double husimi_average(const QuadratureRule& rule, const std::function<double(double)>& g);

inline constexpr std::string_view sampler_algorithm = "splitmix64-counter/box-muller";

/// Deterministic in (seed, index): the i-th sample does not depend on how many
/// others are drawn or in which order.
double sample_amplitude(const AmplitudeDistribution& distribution, std::uint64_t seed, std::uint64_t index);
std::vector<double> sample_amplitudes(const AmplitudeDistribution& distribution, std::size_t count, std::uint64_t seed);

/// Standard normal variate for (seed, index); shared by the detector-noise model.
double standard_normal(std::uint64_t seed, std::uint64_t index);

/// Weighted sum of coherent spectra, one per quadrature node. The spectra must
/// share one frequency grid and their source amplitudes must match the nodes.
SpectrumRecord bsv_average(std::span<const SpectrumRecord> coherent_spectra, const QuadratureRule& rule);

}  // namespace hhg
