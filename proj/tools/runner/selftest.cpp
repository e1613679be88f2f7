#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "commands.hpp"
#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg::runner {
namespace {

double double_factorial_odd(int n) {
  double v = 1.0;
  for (int k = 2 * n - 1; k > 1; k -= 2) v *= k;
  return v;
}

struct Check {
  std::string name;
  std::function<std::string()> run;  ///< empty string on success, else the reason
};

std::string correlation_constants() {
  const double bsv[] = {1, 3, 15, 105, 945, 10395, 135135};
  double factorial = 1.0;
  for (int n = 1; n <= 7; ++n) {
    factorial *= n;
    if (correlation_g(n, LightStatistics::bsv) != bsv[n - 1]) return "g(" + std::to_string(n) + ") for BSV";
    if (correlation_g(n, LightStatistics::thermal) != factorial) return "g(" + std::to_string(n) + ") thermal";
  }
  return {};
}

std::string photon_distribution_integrity() {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto state = SqueezedVacuumState::from_squeeze_parameter(r);
    const auto p = photon_distribution(state, 20000);
    double total = 0.0, mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
      if (n % 2 == 1 && p[n] != 0.0) return "odd photon number has non-zero probability";
      total += p[n];
      mean += static_cast<double>(n) * p[n];
    }
    if (std::abs(total - 1.0) > 1e-9) return "normalization off by " + format_number(total - 1.0);
    const double expected = std::sinh(r) * std::sinh(r);
    if (std::abs(mean / expected - 1.0) > 1e-6) return "mean photon number off at r = " + format_number(r);
  }
  return {};
}

std::string quadrature_moments() {
  const double sigma = 0.7;
  const auto rule = husimi_quadrature({sigma}, 64);
  for (int n = 1; n <= 5; ++n) {
    const double m = husimi_average(rule, [n](double e) { return std::pow(e, 2 * n); });
    const double expected = double_factorial_odd(n) * std::pow(sigma, 2 * n);
    if (std::abs(m / expected - 1.0) > 1e-6) return "moment " + std::to_string(2 * n);
  }
  return {};
}

std::string analytic_enhancement() {
  const auto rule = husimi_quadrature({1.0}, default_quadrature_nodes);
  for (int q = 1; q <= 5; ++q) {
    const double ratio = husimi_average(rule, [q](double e) { return std::pow(e, 2 * q); });
    if (std::abs(ratio / double_factorial_odd(q) - 1.0) > 0.01) return "q = " + std::to_string(q);
  }
  return {};
}

std::string sampler_moments() {
  const auto e = sample_amplitudes({1.0}, 200000, 1);
  double m1 = 0.0, m2 = 0.0;
  for (double x : e) {
    const double i = x * x;
    m1 += i;
    m2 += i * i;
  }
  m1 /= e.size();
  m2 /= e.size();
  const double ratio = m2 / (m1 * m1);
  if (std::abs(ratio - 3.0) > 0.1) return "<I^2>/<I>^2 = " + format_number(ratio);
  return {};
}

std::string zero_field_null() {
  PulseSpec p;
  p.peak_intensity_tw_cm2 = 0.0;
  const auto traj = evolve(ln_like(), synthesize(p), {});
  for (std::size_t i = 0; i < traj.time.size(); ++i) {
    if (traj.interband[i] != 0.0 || traj.intraband[i] != 0.0) return "non-zero current without a field";
  }
  return {};
}

std::string rabi_oracle() {
  PulseSpec p;
  const double omega = units::angular_frequency_from_wavelength_um(p.center_wavelength_um);
  const double fwhm = units::fs_to_au(p.fwhm_fs);
  MaterialModel m;
  m.name = "two-level";
  m.lattice_constant = 8.0;
  m.bandgap = omega;
  m.dipole_scale = 1.0;
  const double area = std::numbers::pi / 2.0;
  const double rabi_peak = area / (fwhm * std::sqrt(std::numbers::pi / (2.0 * std::numbers::ln2)));
  p.peak_field_v_per_angstrom = units::field_to_v_per_angstrom(rabi_peak);
  SolverParams params;
  params.t2_cycles = std::numeric_limits<double>::infinity();
  params.k_points = 64;
  const auto traj = evolve(m, synthesize(p), params);
  const double expected = std::pow(std::sin(area / 2.0), 2);
  if (std::abs(traj.max_population / expected - 1.0) > 0.01) return "peak population " + format_number(traj.max_population);
  return {};
}

std::string power_law_recovery() {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(std::pow(10.0, 0.2 * i));
    y.push_back(3.0 * std::pow(x.back(), 2.7));
  }
  const auto fit = fit_power_law(x, y);
  if (std::abs(fit.exponent - 2.7) > 1e-9 || std::abs(fit.prefactor / 3.0 - 1.0) > 1e-9) return "fit off";
  return {};
}

std::string ridge_recovery() {
  const auto e = sample_amplitudes({1.0}, 100000, 3);
  const auto h = synthesize_joint_histogram(
      e, [](double x) { return std::pow(x, 10); }, 1.0, {}, BinAxis::log_spaced(1e-3, 30.0, 40),
      BinAxis::log_spaced(1e-15, 1e8, 400));
  const double exponent = ridge_exponent(h).exponent;
  if (std::abs(exponent - 5.0) > 0.1) return "exponent " + format_number(exponent);
  return {};
}

std::string spectrum_tone() {
  const double dt = 0.5, omega = 0.05;
  std::vector<double> inter(4096), intra(4096, 0.0);
  for (std::size_t i = 0; i < inter.size(); ++i) inter[i] = std::cos(5.0 * omega * dt * static_cast<double>(i));
  const auto s = hhg_spectrum(inter, intra, dt, omega);
  if (!(harmonic_yield(s, 5) > 1e3 * harmonic_yield(s, 4))) return "tone not isolated at order 5";
  return {};
}

}  // namespace

bool selftest(std::ostream& out) {
  const std::vector<Check> checks = {
      {"correlation constants", correlation_constants},
      {"photon distribution integrity", photon_distribution_integrity},
      {"quadrature moments (M = 64)", quadrature_moments},
      {"power-law enhancement (2q-1)!!", analytic_enhancement},
      {"sampler intensity moments", sampler_moments},
      {"zero-field null run", zero_field_null},
      {"Rabi pulse-area oracle", rabi_oracle},
      {"power-law fit recovery", power_law_recovery},
      {"joint-histogram ridge", ridge_recovery},
      {"spectrum of a pure tone", spectrum_tone},
  };
  bool all = true;
  for (const auto& check : checks) {
    std::string reason;
    try {
      reason = check.run();
    } catch (const std::exception& e) {
      reason = std::string("threw: ") + e.what();
    }
    all = all && reason.empty();
    out << (reason.empty() ? "PASS " : "FAIL ") << check.name;
    if (!reason.empty()) out << ": " << reason;
    out << "\n";
  }
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all;
}

}  // namespace hhg::runner
