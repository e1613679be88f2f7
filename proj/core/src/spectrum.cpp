#include "hhg/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/sbe.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

/// In-place complex transform with the e^{+i w t} kernel.
void transform_positive_kernel(std::vector<std::complex<double>>& data) {
  const int n = static_cast<int>(data.size());
  std::unique_ptr<fftw_complex, FftwFree> buffer(fftw_alloc_complex(data.size()));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buffer.get(), buffer.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < n; ++i) {
    buffer.get()[i][0] = data[i].real();
    buffer.get()[i][1] = data[i].imag();
  }
  fftw_execute(plan);
  for (int i = 0; i < n; ++i) data[i] = {buffer.get()[i][0], buffer.get()[i][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

Window parse_window(std::string_view name) {
  if (name == "hann") return Window::hann;
  if (name == "rectangular" || name == "none") return Window::rectangular;
  throw ConfigError("unknown window '" + std::string(name) + "'", "spectrum.window");
}

CurrentCombination parse_combination(std::string_view name) {
  if (name == "literal") return CurrentCombination::literal;
  if (name == "derivative") return CurrentCombination::derivative;
  throw ConfigError("unknown current combination '" + std::string(name) + "'", "spectrum.combination");
}

std::string_view to_string(Window window) { return window == Window::hann ? "hann" : "rectangular"; }

std::string_view to_string(CurrentCombination c) {
  return c == CurrentCombination::literal ? "literal" : "derivative";
}

std::vector<double> window_samples(Window window, std::size_t count) {
  std::vector<double> w(count, 1.0);
  if (window == Window::hann && count > 1) {
    for (std::size_t i = 0; i < count; ++i) {
      const double s = std::sin(units::pi * static_cast<double>(i) / static_cast<double>(count - 1));
      w[i] = s * s;
    }
  }
  return w;
}

SpectrumRecord hhg_spectrum(std::span<const double> interband, std::span<const double> intraband, double dt,
                            double carrier_frequency, const SpectrumOptions& options) {
  if (interband.size() != intraband.size()) {
    throw ShapeError("interband and intraband traces differ in length (" + std::to_string(interband.size()) + " vs " +
                     std::to_string(intraband.size()) + ")");
  }
  if (interband.empty()) throw ShapeError("empty current traces");
  if (options.pad_factor < 1) throw ConfigError("must be >= 1", "spectrum.pad_factor");
  if (!(dt > 0.0) || !(carrier_frequency > 0.0)) throw DomainError("dt and carrier frequency must be positive");

  const std::size_t n = interband.size();
  const auto w = window_samples(options.window, n);
  std::vector<double> intra_term;
  if (options.combination == CurrentCombination::derivative) intra_term = differentiate(intraband, dt);

  const std::size_t padded = n * static_cast<std::size_t>(options.pad_factor);
  std::vector<std::complex<double>> data(padded, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    if (options.combination == CurrentCombination::literal) {
      data[i] = w[i] * std::complex<double>(interband[i], intraband[i]);
    } else {
      data[i] = w[i] * (interband[i] + intra_term[i]);
    }
  }
  transform_positive_kernel(data);

  SpectrumRecord rec;
  rec.carrier_frequency = carrier_frequency;
  rec.window = options.window;
  rec.combination = options.combination;
  rec.pad_factor = options.pad_factor;
  rec.normalization = options.normalization;
  const double d_omega = 2.0 * units::pi / (static_cast<double>(padded) * dt);
  rec.order_spacing = d_omega / carrier_frequency;
  const std::size_t bins = padded / 2 + 1;
  rec.order.resize(bins);
  rec.density.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    rec.order[k] = static_cast<double>(k) * rec.order_spacing;
    rec.density[k] = options.normalization * std::norm(data[k]) * dt * dt;
  }
  return rec;
}

double harmonic_yield(const SpectrumRecord& s, int order, double half_width) {
  if (order < 1) throw DomainError("harmonic order must be >= 1");
  if (!(half_width > 0.0)) throw DomainError("half width must be positive");
  const double lo = order - half_width;
  const double hi = order + half_width;
  if (hi > s.nyquist_order()) {
    throw RangeError("harmonic " + std::to_string(order) + " band exceeds the Nyquist order " +
                     std::to_string(s.nyquist_order()));
  }
  // Bins are integrated with the midpoint rule; partial edge bins are weighted
  // by their overlap with [lo, hi].
  double sum = 0.0;
  const double width = s.order_spacing;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double centre = s.order[k];
    const double overlap = std::min(hi, centre + 0.5 * width) - std::max(lo, centre - 0.5 * width);
    if (overlap <= 0.0) continue;
    sum += s.density[k] / centre * overlap;
  }
  // d omega / omega = d order / order, so the sum is already dimensionless in w0.
  return sum;
}

double fundamental_peak(const SpectrumRecord& s) {
  double peak = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.order[k] >= 0.5 && s.order[k] <= 1.5) peak = std::max(peak, s.density[k]);
  }
  return peak;
}

SpectrumRecord rescaled(SpectrumRecord s, double factor) {
  for (double& v : s.density) v *= factor;
  s.normalization *= factor;
  return s;
}

}  // namespace hhg
