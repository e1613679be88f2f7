#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hhg {

enum class Envelope { gaussian };

/// Laboratory description of a driving pulse. Exactly one of
/// peak_intensity_tw_cm2 / peak_field_v_per_angstrom must be set.
struct PulseSpec {
  double center_wavelength_um = 1.6;
  double fwhm_fs = 70.0;  ///< intensity FWHM
  std::optional<double> peak_intensity_tw_cm2;
  std::optional<double> peak_field_v_per_angstrom;
  double cep_rad = 0.0;
  Envelope envelope = Envelope::gaussian;
  double time_window_fs = 0.0;  ///< 0 selects 6 x fwhm
  int samples_per_cycle = 128;

  static constexpr double min_window_fwhm = 6.0;
  static constexpr int min_samples_per_cycle = 40;
};

void validate(const PulseSpec& pulse);

/// Peak field in V/A of a linearly polarised pulse of the given peak
/// intensity, E0 = sqrt(2 I / (eps0 c)). Negative intensity is a DomainError.
double intensity_to_peak_field(double intensity_tw_cm2);
double peak_field_to_intensity(double field_v_per_angstrom);

/// Peak field of the pulse in atomic units.
double peak_field_au(const PulseSpec& pulse);

/// Sampled field on a uniform grid symmetric about the envelope peak (t = 0
/// is always a sample). Atomic units throughout; A(t) = -int E dt' with
/// A(t_start) = 0.
struct FieldTrace {
  double carrier_frequency = 0.0;
  double peak_field = 0.0;
  double dt = 0.0;
  std::vector<double> time;
  std::vector<double> field;
  std::vector<double> vector_potential;

  std::size_t size() const noexcept { return time.size(); }
  double period() const;
  double duration() const noexcept { return dt * static_cast<double>(time.size()); }

  /// Field and vector potential at t_n + u dt, 0 <= u <= 1 (cubic Lagrange
  /// interpolation, exact for cubics).
  double field_at(std::size_t n, double u) const;
  double vector_potential_at(std::size_t n, double u) const;
};

FieldTrace synthesize(const PulseSpec& pulse);

/// Value at fractional position n + u of a uniformly sampled series.
double cubic_interpolate(const std::vector<double>& samples, std::size_t n, double u);
double cubic_midpoint(const std::vector<double>& samples, std::size_t n);

nlohmann::json to_config(const PulseSpec& pulse);
/// Rejects unknown keys. `defaults` supplies values for omitted keys.
PulseSpec pulse_from_config(const nlohmann::json& section, const PulseSpec& defaults = {},
                            std::string_view prefix = "pulse");

}  // namespace hhg
