#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace hhg {

enum class Driver { coherent, bsv };

std::string_view to_string(Driver driver);
Driver parse_driver(std::string_view name);

/// Harmonic yield against pump strength (intensity or photon number).
struct ScalingCurve {
  std::vector<double> abscissa;  ///< strictly increasing
  std::vector<double> mean;      ///< >= 0
  std::vector<double> variance;  ///< shot-to-shot variance; may be empty
  int order = 0;
  Driver driver = Driver::coherent;
};

/// ShapeError / DomainError when the curve breaks its invariants.
void validate(const ScalingCurve& curve);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  ///< rms deviation in natural-log space
  std::size_t points = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Ordinary least squares in log-log space over abscissa in [lower, upper].
/// Fewer than 4 points is InsufficientData; non-positive values are a DomainError.
PowerLawFit fit_power_law(const ScalingCurve& curve, double lower, double upper);
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// BSV / coherent yield ratio at equal mean pump strength, both curves
/// interpolated log-log. Needs both curves to bracket `mean_abscissa`
/// (RangeError otherwise) and to be of the same harmonic order.
double enhancement_factor(const ScalingCurve& bsv, const ScalingCurve& coherent, double mean_abscissa);

/// Log-log interpolation of a curve; RangeError outside the sampled span.
double interpolate_loglog(const ScalingCurve& curve, double abscissa);

/// d ln y / d ln x: centred differences inside, one-sided at the ends.
std::vector<double> local_slope(const ScalingCurve& curve);

/// Tabulated amplitude -> yield map, interpolated in log-log space and
/// extended as a power law beyond the tabulated ends.
class YieldMap {
 public:
  YieldMap(std::vector<double> amplitudes, std::vector<double> yields);

  double operator()(double amplitude) const;
  const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
  const std::vector<double>& yields() const noexcept { return yields_; }

 private:
  std::vector<double> amplitudes_;
  std::vector<double> yields_;
};

struct BinAxis {
  std::vector<double> edges;
  bool logarithmic = false;

  static BinAxis linear(double lower, double upper, std::size_t bins);
  static BinAxis log_spaced(double lower, double upper, std::size_t bins);

  std::size_t bins() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
  /// Bin index of `value`; values outside the axis are clamped to the first or last bin.
  std::size_t locate(double value) const;
  /// Arithmetic (linear axes) or geometric (log axes) bin centre.
  double centre(std::size_t bin) const;
};

struct JointHistogram {
  BinAxis pump;
  BinAxis harmonic;
  std::vector<std::uint64_t> counts;  ///< pump-major: counts[i * harmonic.bins() + j]
  std::uint64_t total = 0;

  std::uint64_t at(std::size_t pump_bin, std::size_t harmonic_bin) const {
    return counts[pump_bin * harmonic.bins() + harmonic_bin];
  }
  std::vector<std::uint64_t> pump_marginal() const;
  std::vector<std::uint64_t> harmonic_marginal() const;
};

enum class NoiseModel { none, gaussian_detector };

NoiseModel parse_noise_model(std::string_view name);

struct DetectorNoise {
  NoiseModel model = NoiseModel::none;
  double sigma = 0.0;  ///< absolute standard deviation in harmonic photon units
  std::uint64_t seed = 0;
};

struct ShotEnsemble {
  std::vector<double> amplitude;
  std::vector<double> pump_photons;
  std::vector<double> harmonic_photons;
};

/// Per shot: pump photons = photons_per_amplitude2 * e^2, harmonic photons =
/// yield_map(e) plus detector noise. Empty input is InsufficientData.
ShotEnsemble synthesize_shots(std::span<const double> amplitudes, const std::function<double(double)>& yield_map,
                              double photons_per_amplitude2, const DetectorNoise& noise = {});

JointHistogram bin_shots(const ShotEnsemble& shots, BinAxis pump, BinAxis harmonic);

JointHistogram synthesize_joint_histogram(std::span<const double> amplitudes,
                                          const std::function<double(double)>& yield_map,
                                          double photons_per_amplitude2, const DetectorNoise& noise, BinAxis pump,
                                          BinAxis harmonic);

/// Power law fitted to the histogram ridge: for every pump bin holding at
/// least `min_count` shots, the count-weighted mean of log harmonic bin centres.
/// The first and last pump bins are skipped.
PowerLawFit ridge_exponent(const JointHistogram& histogram, std::uint64_t min_count = 10);

}  // namespace hhg
