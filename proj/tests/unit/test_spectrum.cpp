#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hhg/errors.hpp"
#include "hhg/field.hpp"
#include "hhg/sbe.hpp"
#include "hhg/spectrum.hpp"
#include "hhg/units.hpp"

namespace hhg {
namespace {

constexpr double omega0 = 0.05;

std::vector<double> tone(double order, std::size_t n, double dt, bool hann_envelope = true) {
  std::vector<double> j(n);
  const auto w = window_samples(Window::hann, n);
  for (std::size_t i = 0; i < n; ++i) {
    j[i] = std::cos(order * omega0 * dt * static_cast<double>(i)) * (hann_envelope ? w[i] : 1.0);
  }
  return j;
}

// Sum of S over the full two-sided DFT axis, rebuilt from the one-sided record
// of a real (or purely imaginary) signal.
double two_sided_sum(const SpectrumRecord& s, std::size_t padded) {
  double sum = s.density[0];
  const std::size_t last = s.size() - 1;
  for (std::size_t k = 1; k < s.size(); ++k) sum += (k == last && padded % 2 == 0 ? 1.0 : 2.0) * s.density[k];
  return sum;
}

TEST(Spectrum, ZeroCurrentsGiveZeroSpectrum) {
  std::vector<double> zero(301, 0.0);
  const auto s = hhg_spectrum(zero, zero, 0.5, omega0);
  for (double v : s.density) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(harmonic_yield(s, 3), 0.0);
}

TEST(Spectrum, GridSpacingAndNyquist) {
  const std::size_t n = 1001;
  const double dt = 2.0 * units::pi / omega0 / 128;
  std::vector<double> zero(n, 0.0);
  for (int pad : {1, 2, 4}) {
    SpectrumOptions opts;
    opts.pad_factor = pad;
    const auto s = hhg_spectrum(zero, zero, dt, omega0, opts);
    EXPECT_NEAR(s.order_spacing * omega0, 2.0 * units::pi / (dt * n * pad), 1e-15);
    EXPECT_GE(s.nyquist_order(), 20.0);
    EXPECT_EQ(s.order.front(), 0.0);
  }
}

TEST(Spectrum, TonePeaksAtItsOrder) {
  const double dt = 2.0 * units::pi / omega0 / 64;
  const std::size_t n = 64 * 40;
  const auto j = tone(5.0, n, dt);
  std::vector<double> zero(n, 0.0);
  const auto s = hhg_spectrum(j, zero, dt, omega0);
  const auto peak = std::max_element(s.density.begin(), s.density.end()) - s.density.begin();
  EXPECT_NEAR(s.order[peak], 5.0, s.order_spacing);
  EXPECT_GT(harmonic_yield(s, 5), 1e3 * harmonic_yield(s, 4));
  for (double v : s.density) EXPECT_GE(v, 0.0);
}

TEST(Spectrum, IntrabandTermEntersAsImaginaryPart) {
  const double dt = 2.0 * units::pi / omega0 / 64;
  const std::size_t n = 64 * 40;
  const auto j = tone(3.0, n, dt, false);
  std::vector<double> zero(n, 0.0);
  const auto inter = hhg_spectrum(j, zero, dt, omega0);
  const auto intra = hhg_spectrum(zero, j, dt, omega0);
  for (std::size_t k = 0; k < inter.size(); ++k) EXPECT_NEAR(inter.density[k], intra.density[k], 1e-9 * inter.density[k] + 1e-300);
}

TEST(Spectrum, ParsevalForRealAndImaginaryCurrents) {
  const double dt = 0.7;
  for (std::size_t n : {999u, 1000u}) {
    for (int pad : {1, 2}) {
      std::vector<double> j(n), zero(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) j[i] = std::sin(0.013 * i * i) + 0.3 * std::cos(0.4 * i);
      SpectrumOptions opts;
      opts.pad_factor = pad;
      opts.normalization = 2.5;
      const auto w = window_samples(Window::hann, n);
      double time_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) time_sum += (w[i] * j[i]) * (w[i] * j[i]);
      const double padded = static_cast<double>(n * pad);
      const double expected = opts.normalization * dt * dt * padded * time_sum;
      for (bool imaginary : {false, true}) {
        const auto s = imaginary ? hhg_spectrum(zero, j, dt, omega0, opts) : hhg_spectrum(j, zero, dt, omega0, opts);
        EXPECT_NEAR(two_sided_sum(s, n * pad), expected, 1e-10 * expected) << n << " " << pad;
      }
    }
  }
}

TEST(Spectrum, ScalesQuadratically) {
  const double dt = 0.7;
  const std::size_t n = 777;
  std::vector<double> a(n), b(n), a2(n), b2(n), a3(n), b3(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::sin(0.02 * i * i);
    b[i] = std::cos(0.11 * i);
    a2[i] = 2.0 * a[i];
    b2[i] = 2.0 * b[i];
    a3[i] = 3.0 * a[i];
    b3[i] = 3.0 * b[i];
  }
  const auto s1 = hhg_spectrum(a, b, dt, omega0);
  const auto s2 = hhg_spectrum(a2, b2, dt, omega0);
  const auto s3 = hhg_spectrum(a3, b3, dt, omega0);
  for (std::size_t k = 0; k < s1.size(); ++k) {
    EXPECT_EQ(s2.density[k], 4.0 * s1.density[k]);
    EXPECT_NEAR(s3.density[k], 9.0 * s1.density[k], 1e-12 * s3.density[k] + 1e-300);
  }
}

TEST(Spectrum, MismatchedTracesAreShapeError) {
  std::vector<double> a(10), b(11);
  EXPECT_THROW(hhg_spectrum(a, b, 1.0, omega0), ShapeError);
}

TEST(Spectrum, YieldBeyondNyquistIsRangeError) {
  std::vector<double> a(256, 0.0);
  const double dt = 2.0 * units::pi / omega0 / 40;  // Nyquist at order 20
  const auto s = hhg_spectrum(a, a, dt, omega0);
  EXPECT_NO_THROW(harmonic_yield(s, 19));
  EXPECT_THROW(harmonic_yield(s, 20), RangeError);
  EXPECT_THROW(harmonic_yield(s, 0), DomainError);
}

TEST(Spectrum, DerivativeCombination) {
  const double dt = 2.0 * units::pi / omega0 / 128;
  const std::size_t n = 128 * 30;
  std::vector<double> intra(n), slope(n), zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    intra[i] = std::sin(3.0 * omega0 * t);
    slope[i] = 3.0 * omega0 * std::cos(3.0 * omega0 * t);
  }
  SpectrumOptions opts;
  opts.combination = CurrentCombination::derivative;
  const auto viaDerivative = hhg_spectrum(zero, intra, dt, omega0, opts);
  const auto direct = hhg_spectrum(slope, zero, dt, omega0);
  // Fourth-order stencil at 128 samples per cycle: ~(0.15)^4 / 30 in amplitude.
  EXPECT_NEAR(harmonic_yield(viaDerivative, 3) / harmonic_yield(direct, 3), 1.0, 1e-4);
}

TEST(Spectrum, ParsesOptions) {
  EXPECT_EQ(parse_window("hann"), Window::hann);
  EXPECT_EQ(parse_window("rectangular"), Window::rectangular);
  EXPECT_THROW(parse_window("kaiser"), ConfigError);
  EXPECT_EQ(parse_combination("literal"), CurrentCombination::literal);
  EXPECT_THROW(parse_combination("sum"), ConfigError);
}

TEST(Spectrum, RescaledTracksNormalization) {
  std::vector<double> a(64, 1.0), b(64, 0.0);
  const auto s = hhg_spectrum(a, b, 1.0, omega0);
  const auto r = rescaled(s, 0.25);
  EXPECT_EQ(r.normalization, 0.25);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(r.density[k], 0.25 * s.density[k]);
}

class SimulatedSpectrum : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    PulseSpec p;
    p.peak_intensity_tw_cm2 = 0.5;
    const auto trace = synthesize(p);
    traj_ = new SBETrajectory(evolve(asi_like(), trace, {}));
    omega_ = trace.carrier_frequency;
  }
  static void TearDownTestSuite() { delete traj_; }

  static SpectrumRecord spectrum(int pad) {
    SpectrumOptions opts;
    opts.pad_factor = pad;
    return hhg_spectrum(interband_current(*traj_), intraband_current(*traj_), traj_->dt, omega_, opts);
  }

  static inline SBETrajectory* traj_ = nullptr;
  static inline double omega_ = 0.0;
};

TEST_F(SimulatedSpectrum, PaddingLeavesYieldsUnchanged) {
  const auto base = spectrum(1);
  const auto padded = spectrum(2);
  for (int q : {1, 3, 5, 7}) {
    EXPECT_LT(std::abs(harmonic_yield(padded, q) / harmonic_yield(base, q) - 1.0), 1e-3) << q;
  }
}

TEST_F(SimulatedSpectrum, YieldInsensitiveToBandWidth) {
  const auto s = spectrum(1);
  for (int q : {3, 5, 7}) {
    const double ref = harmonic_yield(s, q, 0.5);
    for (double hw : {0.3, 0.4}) EXPECT_LT(std::abs(harmonic_yield(s, q, hw) / ref - 1.0), 0.02) << q << " " << hw;
  }
}

}  // namespace
}  // namespace hhg
