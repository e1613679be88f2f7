#include "hhg/field.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

void validate(const PulseSpec& p) {
  if (!(p.center_wavelength_um > 0.0)) throw ConfigError("must be positive", "pulse.center_wavelength_um");
  if (!(p.fwhm_fs > 0.0)) throw ConfigError("must be positive", "pulse.fwhm_fs");
  if (p.peak_intensity_tw_cm2.has_value() == p.peak_field_v_per_angstrom.has_value()) {
    throw ConfigError("exactly one of peak_intensity_tw_cm2 and peak_field_v_per_angstrom must be given",
                      "pulse.peak_intensity_tw_cm2");
  }
  if (p.peak_intensity_tw_cm2 && !(*p.peak_intensity_tw_cm2 >= 0.0)) {
    throw ConfigError("must be >= 0", "pulse.peak_intensity_tw_cm2");
  }
  if (p.peak_field_v_per_angstrom && !(*p.peak_field_v_per_angstrom >= 0.0)) {
    throw ConfigError("must be >= 0", "pulse.peak_field_v_per_angstrom");
  }
  if (!std::isfinite(p.cep_rad)) throw ConfigError("must be finite", "pulse.cep_rad");
  if (p.time_window_fs != 0.0 && !(p.time_window_fs >= PulseSpec::min_window_fwhm * p.fwhm_fs)) {
    throw ConfigError("must be at least 6 x fwhm_fs", "pulse.time_window_fs");
  }
  if (p.samples_per_cycle < PulseSpec::min_samples_per_cycle) {
    throw ConfigError("time step too coarse: need at least 40 samples per optical cycle",
                      "pulse.samples_per_cycle");
  }
}

double intensity_to_peak_field(double intensity_tw_cm2) {
  if (!(intensity_tw_cm2 >= 0.0)) throw DomainError("intensity must be non-negative");
  const double intensity_w_m2 = intensity_tw_cm2 * 1.0e12 * 1.0e4;
  const double field_v_m =
      std::sqrt(2.0 * intensity_w_m2 / (units::vacuum_permittivity_si * units::speed_of_light_si));
  return field_v_m * 1.0e-10;
}

double peak_field_to_intensity(double field_v_per_angstrom) {
  if (!(field_v_per_angstrom >= 0.0)) throw DomainError("field amplitude must be non-negative");
  const double field_v_m = field_v_per_angstrom * 1.0e10;
  const double intensity_w_m2 = 0.5 * units::vacuum_permittivity_si * units::speed_of_light_si * field_v_m * field_v_m;
  return intensity_w_m2 * 1.0e-16;
}

double peak_field_au(const PulseSpec& p) {
  if (p.peak_field_v_per_angstrom) return units::field_to_au(*p.peak_field_v_per_angstrom);
  if (p.peak_intensity_tw_cm2) return units::field_to_au(intensity_to_peak_field(*p.peak_intensity_tw_cm2));
  throw ConfigError("no peak intensity or field given", "pulse.peak_intensity_tw_cm2");
}

double FieldTrace::period() const { return 2.0 * units::pi / carrier_frequency; }

double cubic_interpolate(const std::vector<double>& s, std::size_t n, double u) {
  const std::size_t size = s.size();
  if (size < 4) return (1.0 - u) * s[n] + u * s[std::min(n + 1, size - 1)];
  // Four-point Lagrange stencil, shifted inwards at the ends.
  const std::size_t base = std::min(n == 0 ? 0 : n - 1, size - 4);
  const double x = static_cast<double>(n - base) + u;
  const double w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
  const double w1 = x * (x - 2.0) * (x - 3.0) / 2.0;
  const double w2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
  const double w3 = x * (x - 1.0) * (x - 2.0) / 6.0;
  return w0 * s[base] + w1 * s[base + 1] + w2 * s[base + 2] + w3 * s[base + 3];
}

double cubic_midpoint(const std::vector<double>& s, std::size_t n) { return cubic_interpolate(s, n, 0.5); }

double FieldTrace::field_at(std::size_t n, double u) const { return cubic_interpolate(field, n, u); }

double FieldTrace::vector_potential_at(std::size_t n, double u) const {
  return cubic_interpolate(vector_potential, n, u);
}

FieldTrace synthesize(const PulseSpec& pulse) {
  validate(pulse);
  FieldTrace trace;
  trace.carrier_frequency = units::angular_frequency_from_wavelength_um(pulse.center_wavelength_um);
  trace.peak_field = peak_field_au(pulse);
  trace.dt = trace.period() / pulse.samples_per_cycle;

  const double fwhm = units::fs_to_au(pulse.fwhm_fs);
  const double window =
      units::fs_to_au(pulse.time_window_fs > 0.0 ? pulse.time_window_fs : PulseSpec::min_window_fwhm * pulse.fwhm_fs);
  // Odd sample count so that t = 0 lands on the grid.
  const auto half = static_cast<std::size_t>(std::ceil(0.5 * window / trace.dt));
  const std::size_t count = 2 * half + 1;

  const double e0 = trace.peak_field;
  const double omega = trace.carrier_frequency;
  const double rate = 2.0 * std::numbers::ln2 / (fwhm * fwhm);
  auto envelope = [&](double t) { return std::exp(-rate * t * t); };
  auto field = [&](double t) { return e0 * envelope(t) * std::cos(omega * t + pulse.cep_rad); };
  auto field_slope = [&](double t) {
    const double g = envelope(t);
    return e0 * (-2.0 * rate * t * g * std::cos(omega * t + pulse.cep_rad) - g * omega * std::sin(omega * t + pulse.cep_rad));
  };

  trace.time.resize(count);
  trace.field.resize(count);
  trace.vector_potential.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = (static_cast<double>(i) - static_cast<double>(half)) * trace.dt;
    trace.time[i] = t;
    trace.field[i] = field(t);
  }

  // Cumulative trapezoid with the Euler-Maclaurin end correction, which makes
  // each panel O(h^5) for the smooth analytic field.
  const double h = trace.dt;
  trace.vector_potential[0] = 0.0;
  double slope_prev = field_slope(trace.time[0]);
  for (std::size_t i = 1; i < count; ++i) {
    const double slope = field_slope(trace.time[i]);
    const double panel = 0.5 * h * (trace.field[i - 1] + trace.field[i]) - h * h / 12.0 * (slope - slope_prev);
    trace.vector_potential[i] = trace.vector_potential[i - 1] - panel;
    slope_prev = slope;
  }
  return trace;
}

nlohmann::json to_config(const PulseSpec& p) {
  nlohmann::json j = {
      {"center_wavelength_um", p.center_wavelength_um},
      {"fwhm_fs", p.fwhm_fs},
      {"cep_rad", p.cep_rad},
      {"envelope", "gaussian"},
      {"time_window_fs", p.time_window_fs},
      {"samples_per_cycle", p.samples_per_cycle},
  };
  if (p.peak_intensity_tw_cm2) j["peak_intensity_tw_cm2"] = *p.peak_intensity_tw_cm2;
  if (p.peak_field_v_per_angstrom) j["peak_field_v_per_angstrom"] = *p.peak_field_v_per_angstrom;
  return j;
}

PulseSpec pulse_from_config(const nlohmann::json& section, const PulseSpec& defaults, std::string_view prefix) {
  static const std::set<std::string> known = {"center_wavelength_um", "fwhm_fs", "peak_intensity_tw_cm2",
                                              "peak_field_v_per_angstrom", "cep_rad", "envelope",
                                              "time_window_fs", "samples_per_cycle"};
  const std::string pre(prefix);
  if (!section.is_object()) throw ConfigError("must be an object", pre);
  for (const auto& [key, value] : section.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key", pre + "." + key);
  }
  auto number = [&](const char* key) {
    const auto& v = section.at(key);
    if (!v.is_number()) throw ConfigError("must be a number", pre + "." + key);
    return v.get<double>();
  };

  PulseSpec p = defaults;
  if (section.contains("center_wavelength_um")) p.center_wavelength_um = number("center_wavelength_um");
  if (section.contains("fwhm_fs")) p.fwhm_fs = number("fwhm_fs");
  if (section.contains("peak_intensity_tw_cm2")) {
    p.peak_intensity_tw_cm2 = number("peak_intensity_tw_cm2");
    if (!section.contains("peak_field_v_per_angstrom")) p.peak_field_v_per_angstrom.reset();
  }
  if (section.contains("peak_field_v_per_angstrom")) {
    p.peak_field_v_per_angstrom = number("peak_field_v_per_angstrom");
    if (!section.contains("peak_intensity_tw_cm2")) p.peak_intensity_tw_cm2.reset();
  }
  if (section.contains("cep_rad")) p.cep_rad = number("cep_rad");
  if (section.contains("envelope")) {
    if (section["envelope"] != "gaussian") throw ConfigError("only 'gaussian' is supported", pre + ".envelope");
  }
  if (section.contains("time_window_fs")) p.time_window_fs = number("time_window_fs");
  if (section.contains("samples_per_cycle")) {
    const auto& v = section["samples_per_cycle"];
    if (!v.is_number_integer()) throw ConfigError("must be an integer", pre + ".samples_per_cycle");
    p.samples_per_cycle = v.get<int>();
  }
  try {
    validate(p);
  } catch (const ConfigError& e) {
    std::string key = e.key();
    if (key.rfind("pulse.", 0) == 0) key = pre + key.substr(5);
    throw ConfigError(e.detail(), key);
  }
  return p;
}

}  // namespace hhg
