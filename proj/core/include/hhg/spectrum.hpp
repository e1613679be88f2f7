#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hhg {

enum class Window { hann, rectangular };

/// How the two current contributions enter the Fourier transform.
enum class CurrentCombination {
  literal,     ///< J_inter + i J_intra
  derivative,  ///< J_inter + dJ_intra/dt
};

Window parse_window(std::string_view name);
CurrentCombination parse_combination(std::string_view name);
std::string_view to_string(Window window);
std::string_view to_string(CurrentCombination combination);

struct SpectrumOptions {
  Window window = Window::hann;
  CurrentCombination combination = CurrentCombination::literal;
  int pad_factor = 1;          ///< zero-padded length = pad_factor * samples
  double normalization = 1.0;  ///< multiplies |FT|^2
};

struct SpectrumSource {
  std::string material;
  double peak_field = 0.0;  ///< atomic units; the Husimi scale for BSV averages
  int quadrature_nodes = 0;  ///< 0 for a single coherent run
  double fwhm_fs = 0.0;
};

/// HHG spectral density on the non-negative frequency axis, in units of the
/// carrier frequency.
struct SpectrumRecord {
  std::vector<double> order;    ///< omega / omega_0
  std::vector<double> density;  ///< S(omega) >= 0
  double carrier_frequency = 0.0;
  double order_spacing = 0.0;
  Window window = Window::hann;
  CurrentCombination combination = CurrentCombination::literal;
  int pad_factor = 1;
  double normalization = 1.0;
  SpectrumSource source;

  std::size_t size() const noexcept { return order.size(); }
  double nyquist_order() const { return order.empty() ? 0.0 : order.back(); }
};

/// S(w) = normalization * |dt sum_n w_n J(t_n) e^{i w t_n}|^2 with
/// J = J_inter + i J_intra (or the derivative combination).
/// Mismatched trace lengths raise ShapeError.
SpectrumRecord hhg_spectrum(std::span<const double> interband, std::span<const double> intraband, double dt,
                            double carrier_frequency, const SpectrumOptions& options = {});

/// Photon-number yield of harmonic q: the integral of S(w)/w over
/// [q - half_width, q + half_width] * w0. Bands beyond Nyquist raise RangeError.
double harmonic_yield(const SpectrumRecord& spectrum, int order, double half_width = 0.5);

/// Largest spectral density within half an order of the fundamental.
double fundamental_peak(const SpectrumRecord& spectrum);

/// Copy of `spectrum` with density (and recorded normalization) multiplied by `factor`.
SpectrumRecord rescaled(SpectrumRecord spectrum, double factor);

std::vector<double> window_samples(Window window, std::size_t count);

}  // namespace hhg
