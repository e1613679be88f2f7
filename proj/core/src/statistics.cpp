#include "hhg/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/quantum_light.hpp"

namespace hhg {

std::string_view to_string(Driver driver) { return driver == Driver::coherent ? "coherent" : "bsv"; }

Driver parse_driver(std::string_view name) {
  if (name == "coherent") return Driver::coherent;
  if (name == "bsv") return Driver::bsv;
  throw ConfigError("unknown driver '" + std::string(name) + "'", "driver");
}

void validate(const ScalingCurve& c) {
  if (c.abscissa.size() != c.mean.size()) throw ShapeError("scaling curve abscissa and mean differ in length");
  if (!c.variance.empty() && c.variance.size() != c.mean.size()) {
    throw ShapeError("scaling curve variance has the wrong length");
  }
  for (std::size_t i = 1; i < c.abscissa.size(); ++i) {
    if (!(c.abscissa[i] > c.abscissa[i - 1])) throw DomainError("scaling curve abscissa must be strictly increasing");
  }
  for (double y : c.mean) {
    if (!(y >= 0.0)) throw DomainError("scaling curve yields must be non-negative");
  }
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("power-law fit inputs differ in length");
  if (x.size() < 4) throw InsufficientData("power-law fit needs at least 4 points, got " + std::to_string(x.size()));
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("power-law fit needs positive abscissa and yields");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("power-law fit needs distinct abscissa values");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = n;
  fit.lower = *std::min_element(x.begin(), x.end());
  fit.upper = *std::max_element(x.begin(), x.end());
  return fit;
}

PowerLawFit fit_power_law(const ScalingCurve& curve, double lower, double upper) {
  validate(curve);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.abscissa.size(); ++i) {
    if (curve.abscissa[i] >= lower && curve.abscissa[i] <= upper) {
      x.push_back(curve.abscissa[i]);
      y.push_back(curve.mean[i]);
    }
  }
  auto fit = fit_power_law(x, y);
  fit.lower = lower;
  fit.upper = upper;
  return fit;
}

double interpolate_loglog(const ScalingCurve& c, double x) {
  validate(c);
  if (c.abscissa.empty() || x < c.abscissa.front() || x > c.abscissa.back()) {
    throw RangeError("value " + std::to_string(x) + " lies outside the sampled range; extrapolation refused");
  }
  const auto it = std::lower_bound(c.abscissa.begin(), c.abscissa.end(), x);
  const auto i = static_cast<std::size_t>(it - c.abscissa.begin());
  if (c.abscissa[i] == x) return c.mean[i];
  const double x0 = c.abscissa[i - 1], x1 = c.abscissa[i];
  const double y0 = c.mean[i - 1], y1 = c.mean[i];
  if (x0 > 0.0 && y0 > 0.0 && y1 > 0.0) {
    const double u = std::log(x / x0) / std::log(x1 / x0);
    return y0 * std::pow(y1 / y0, u);
  }
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double enhancement_factor(const ScalingCurve& bsv, const ScalingCurve& coherent, double mean_abscissa) {
  if (bsv.order != coherent.order) throw ShapeError("enhancement needs curves of the same harmonic order");
  const double coherent_yield = interpolate_loglog(coherent, mean_abscissa);
  const double bsv_yield = interpolate_loglog(bsv, mean_abscissa);
  if (!(coherent_yield > 0.0)) throw DomainError("coherent yield is zero at the requested intensity");
  return bsv_yield / coherent_yield;
}

std::vector<double> local_slope(const ScalingCurve& c) {
  validate(c);
  const std::size_t n = c.abscissa.size();
  if (n < 3) throw InsufficientData("local slope needs at least 3 points");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.abscissa[i] > 0.0) || !(c.mean[i] > 0.0)) throw DomainError("local slope needs positive values");
    lx[i] = std::log(c.abscissa[i]);
    ly[i] = std::log(c.mean[i]);
  }
  std::vector<double> slope(n);
  slope[0] = (ly[1] - ly[0]) / (lx[1] - lx[0]);
  slope[n - 1] = (ly[n - 1] - ly[n - 2]) / (lx[n - 1] - lx[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (ly[i + 1] - ly[i - 1]) / (lx[i + 1] - lx[i - 1]);
  return slope;
}

YieldMap::YieldMap(std::vector<double> amplitudes, std::vector<double> yields)
    : amplitudes_(std::move(amplitudes)), yields_(std::move(yields)) {
  if (amplitudes_.size() != yields_.size()) throw ShapeError("yield map arrays differ in length");
  if (amplitudes_.size() < 2) throw InsufficientData("yield map needs at least 2 points");
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (!(amplitudes_[i] > 0.0)) throw DomainError("yield map amplitudes must be positive");
    if (i > 0 && !(amplitudes_[i] > amplitudes_[i - 1])) throw DomainError("yield map amplitudes must increase");
    if (!(yields_[i] >= 0.0)) throw DomainError("yield map values must be non-negative");
  }
}

double YieldMap::operator()(double e) const {
  if (e <= 0.0) return 0.0;
  const auto& a = amplitudes_;
  const auto& y = yields_;
  std::size_t i;
  if (e <= a.front()) {
    i = 1;
  } else if (e >= a.back()) {
    i = a.size() - 1;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), e) - a.begin());
  }
  const double a0 = a[i - 1], a1 = a[i], y0 = y[i - 1], y1 = y[i];
  if (y0 > 0.0 && y1 > 0.0) {
    const double slope = std::log(y1 / y0) / std::log(a1 / a0);
    return y0 * std::pow(e / a0, slope);
  }
  const double value = y0 + (y1 - y0) * (e - a0) / (a1 - a0);
  return std::max(value, 0.0);
}

BinAxis BinAxis::linear(double lower, double upper, std::size_t bins) {
  if (bins < 1 || !(upper > lower)) throw DomainError("bin axis needs upper > lower and at least one bin");
  BinAxis axis;
  axis.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) axis.edges[i] = lower + (upper - lower) * static_cast<double>(i) / bins;
  return axis;
}

BinAxis BinAxis::log_spaced(double lower, double upper, std::size_t bins) {
  if (bins < 1 || !(lower > 0.0) || !(upper > lower)) {
    throw DomainError("log bin axis needs 0 < lower < upper and at least one bin");
  }
  BinAxis axis;
  axis.logarithmic = true;
  axis.edges.resize(bins + 1);
  const double ratio = std::log(upper / lower);
  for (std::size_t i = 0; i <= bins; ++i) axis.edges[i] = lower * std::exp(ratio * static_cast<double>(i) / bins);
  axis.edges.back() = upper;
  return axis;
}

std::size_t BinAxis::locate(double value) const {
  const std::size_t n = bins();
  if (n == 0) throw ShapeError("empty bin axis");
  if (!(value >= edges.front())) return 0;
  if (value >= edges.back()) return n - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

double BinAxis::centre(std::size_t bin) const {
  return logarithmic ? std::sqrt(edges[bin] * edges[bin + 1]) : 0.5 * (edges[bin] + edges[bin + 1]);
}

std::vector<std::uint64_t> JointHistogram::pump_marginal() const {
  std::vector<std::uint64_t> m(pump.bins(), 0);
  for (std::size_t i = 0; i < pump.bins(); ++i) {
    for (std::size_t j = 0; j < harmonic.bins(); ++j) m[i] += at(i, j);
  }
  return m;
}

std::vector<std::uint64_t> JointHistogram::harmonic_marginal() const {
  std::vector<std::uint64_t> m(harmonic.bins(), 0);
  for (std::size_t i = 0; i < pump.bins(); ++i) {
    for (std::size_t j = 0; j < harmonic.bins(); ++j) m[j] += at(i, j);
  }
  return m;
}

NoiseModel parse_noise_model(std::string_view name) {
  if (name == "none") return NoiseModel::none;
  if (name == "gaussian-detector" || name == "gaussian") return NoiseModel::gaussian_detector;
  throw ConfigError("unknown noise model '" + std::string(name) + "'", "shots.noise_model");
}

ShotEnsemble synthesize_shots(std::span<const double> amplitudes, const std::function<double(double)>& yield_map,
                              double photons_per_amplitude2, const DetectorNoise& noise) {
  if (amplitudes.empty()) throw InsufficientData("no amplitude samples");
  ShotEnsemble shots;
  const std::size_t n = amplitudes.size();
  shots.amplitude.assign(amplitudes.begin(), amplitudes.end());
  shots.pump_photons.resize(n);
  shots.harmonic_photons.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = amplitudes[i];
    shots.pump_photons[i] = photons_per_amplitude2 * e * e;
    double h = yield_map(e);
    if (noise.model == NoiseModel::gaussian_detector) h += noise.sigma * standard_normal(noise.seed, i);
    shots.harmonic_photons[i] = h;
  }
  return shots;
}

JointHistogram bin_shots(const ShotEnsemble& shots, BinAxis pump, BinAxis harmonic) {
  if (shots.pump_photons.empty()) throw InsufficientData("no shots to bin");
  JointHistogram h;
  h.pump = std::move(pump);
  h.harmonic = std::move(harmonic);
  h.counts.assign(h.pump.bins() * h.harmonic.bins(), 0);
  for (std::size_t i = 0; i < shots.pump_photons.size(); ++i) {
    const std::size_t p = h.pump.locate(shots.pump_photons[i]);
    const std::size_t q = h.harmonic.locate(shots.harmonic_photons[i]);
    ++h.counts[p * h.harmonic.bins() + q];
    ++h.total;
  }
  return h;
}

JointHistogram synthesize_joint_histogram(std::span<const double> amplitudes,
                                          const std::function<double(double)>& yield_map,
                                          double photons_per_amplitude2, const DetectorNoise& noise, BinAxis pump,
                                          BinAxis harmonic) {
  return bin_shots(synthesize_shots(amplitudes, yield_map, photons_per_amplitude2, noise), std::move(pump),
                   std::move(harmonic));
}

PowerLawFit ridge_exponent(const JointHistogram& h, std::uint64_t min_count) {
  std::vector<double> x, y;
  // The outermost pump bins also hold clamped out-of-range shots.
  for (std::size_t i = 1; i + 1 < h.pump.bins(); ++i) {
    std::uint64_t column = 0;
    double log_sum = 0.0;
    for (std::size_t j = 0; j < h.harmonic.bins(); ++j) {
      const auto c = h.at(i, j);
      if (c == 0) continue;
      const double centre = h.harmonic.centre(j);
      if (!(centre > 0.0)) continue;
      column += c;
      log_sum += static_cast<double>(c) * std::log(centre);
    }
    if (column < min_count || column == 0) continue;
    const double pump_centre = h.pump.centre(i);
    if (!(pump_centre > 0.0)) continue;
    x.push_back(pump_centre);
    y.push_back(std::exp(log_sum / static_cast<double>(column)));
  }
  return fit_power_law(x, y);
}

}  // namespace hhg
