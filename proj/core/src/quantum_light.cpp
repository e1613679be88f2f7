#include "hhg/quantum_light.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

SqueezedVacuumState SqueezedVacuumState::from_squeeze_parameter(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("squeeze parameter must be finite and >= 0");
  return SqueezedVacuumState(r);
}

SqueezedVacuumState SqueezedVacuumState::from_mean_photon_number(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("mean photon number must be finite and >= 0");
  return SqueezedVacuumState(std::asinh(std::sqrt(mean)));
}

double SqueezedVacuumState::mean_photon_number() const {
  const double s = std::sinh(r_);
  return s * s;
}

double photon_probability(const SqueezedVacuumState& state, std::int64_t photons) {
  if (photons < 0) throw DomainError("photon number must be >= 0");
  if (photons % 2 != 0) return 0.0;
  const double r = state.squeeze_parameter();
  if (photons == 0) return 1.0 / std::cosh(r);
  if (r == 0.0) return 0.0;
  const double m = static_cast<double>(photons / 2);
  const double log_p = std::lgamma(2.0 * m + 1.0) - 2.0 * m * std::numbers::ln2 - 2.0 * std::lgamma(m + 1.0) +
                       2.0 * m * std::log(std::tanh(r)) - std::log(std::cosh(r));
  return std::exp(log_p);
}

std::vector<double> photon_distribution(const SqueezedVacuumState& state, std::int64_t max_photons) {
  if (max_photons < 0) throw DomainError("photon number must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(max_photons) + 1, 0.0);
  const double t = std::tanh(state.squeeze_parameter());
  const double t2 = t * t;
  double current = 1.0 / std::cosh(state.squeeze_parameter());
  for (std::int64_t n = 0; n <= max_photons; n += 2) {
    p[static_cast<std::size_t>(n)] = current;
    const double m = static_cast<double>(n / 2);
    // P(2m+2) / P(2m) = (2m+1) / (2m+2) tanh^2 r
    current *= (2.0 * m + 1.0) / (2.0 * m + 2.0) * t2;
  }
  return p;
}

double macroscopic_energy_pdf(const SqueezedVacuumState& state, double photons) {
  if (!(photons > 0.0)) throw DomainError("photon number must be positive for the continuous density");
  const double mean = state.mean_photon_number();
  if (!(mean > 0.0)) throw DomainError("continuous density needs a positive mean photon number");
  return std::exp(-photons / (2.0 * mean)) / std::sqrt(2.0 * units::pi * photons * mean);
}

double macroscopic_energy_cdf(const SqueezedVacuumState& state, double photons) {
  if (photons <= 0.0) return 0.0;
  return std::erf(std::sqrt(photons / (2.0 * state.mean_photon_number())));
}

LightStatistics parse_statistics(std::string_view name) {
  if (name == "bsv") return LightStatistics::bsv;
  if (name == "thermal") return LightStatistics::thermal;
  if (name == "coherent") return LightStatistics::coherent;
  throw ConfigError("unknown light statistics '" + std::string(name) + "'", "statistics");
}

double correlation_g(int n, LightStatistics statistics) {
  if (n < 1) throw DomainError("correlation order must be >= 1");
  double value = 1.0;
  switch (statistics) {
    case LightStatistics::bsv:
      for (int k = 2 * n - 1; k > 1; k -= 2) value *= k;
      return value;
    case LightStatistics::thermal:
      for (int k = 2; k <= n; ++k) value *= k;
      return value;
    case LightStatistics::coherent:
      return 1.0;
  }
  return value;
}

double AmplitudeDistribution::density(double amplitude) const {
  if (amplitude < 0.0) return 0.0;
  if (!(scale > 0.0)) throw DomainError("amplitude distribution needs a positive scale");
  const double x = amplitude / scale;
  return 2.0 / std::sqrt(2.0 * units::pi * scale * scale) * std::exp(-0.5 * x * x);
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw DomainError("quadrature needs at least one node");
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(units::pi * (i + 0.75) / (count + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = count * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    derivative = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    weights[i] = w;
    weights[count - 1 - i] = w;
  }
}

double default_quadrature_cutoff(int count) { return 5.0 + std::sqrt(0.5 * count); }

QuadratureRule husimi_quadrature(const AmplitudeDistribution& dist, int count, double cutoff) {
  if (count < 1) throw ConfigError("need at least one quadrature node", "quantum.nodes");
  if (cutoff == 0.0) cutoff = default_quadrature_cutoff(count);
  if (!(cutoff > 0.0)) throw ConfigError("must be positive", "quantum.cutoff");
  if (!(dist.scale >= 0.0)) throw DomainError("amplitude scale must be >= 0");
  QuadratureRule rule;
  rule.scale = dist.scale;
  rule.cutoff = cutoff;
  if (dist.scale == 0.0) {
    rule.nodes.assign(count, 0.0);
    rule.weights.assign(count, 1.0 / count);
    return rule;
  }
  std::vector<double> x, w;
  gauss_legendre(count, x, w);
  const double upper = cutoff * dist.scale;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  double total = 0.0;
  for (int j = 0; j < count; ++j) {
    rule.nodes[j] = 0.5 * upper * (x[j] + 1.0);
    rule.weights[j] = 0.5 * upper * w[j] * dist.density(rule.nodes[j]);
    total += rule.weights[j];
  }
  for (double& weight : rule.weights) weight /= total;
  return rule;
}

double husimi_average(const QuadratureRule& rule, const std::function<double(double)>& g) {
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) sum += rule.weights[j] * g(rule.nodes[j]);
  return sum;
}

namespace {

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform on (0, 1].
double unit_interval(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t base = splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL);
  const double u1 = unit_interval(splitmix64(base));
  const double u2 = unit_interval(splitmix64(base + 0x632BE59BD9B4E019ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * units::pi * u2);
}

double sample_amplitude(const AmplitudeDistribution& dist, std::uint64_t seed, std::uint64_t index) {
  return dist.scale * std::abs(standard_normal(seed, index));
}

std::vector<double> sample_amplitudes(const AmplitudeDistribution& dist, std::size_t count, std::uint64_t seed) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = sample_amplitude(dist, seed, i);
  return out;
}

SpectrumRecord bsv_average(std::span<const SpectrumRecord> spectra, const QuadratureRule& rule) {
  if (spectra.size() != rule.size()) {
    throw ShapeError("got " + std::to_string(spectra.size()) + " coherent spectra for " + std::to_string(rule.size()) +
                     " quadrature nodes");
  }
  if (spectra.empty()) throw ShapeError("empty quadrature");
  const auto& first = spectra.front();
  SpectrumRecord out = first;
  std::fill(out.density.begin(), out.density.end(), 0.0);
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const auto& s = spectra[j];
    if (s.size() != first.size() || s.order_spacing != first.order_spacing) {
      throw ShapeError("coherent spectra do not share one frequency grid");
    }
    const double node = rule.nodes[j];
    if (std::abs(s.source.peak_field - node) > 1e-9 * std::abs(node) + 1e-300) {
      throw ShapeError("spectrum " + std::to_string(j) + " amplitude does not match quadrature node");
    }
    for (std::size_t k = 0; k < s.size(); ++k) out.density[k] += rule.weights[j] * s.density[k];
  }
  out.source.peak_field = rule.scale;
  out.source.quadrature_nodes = static_cast<int>(rule.size());
  return out;
}

}  // namespace hhg
