#include <gtest/gtest.h>

#include <cmath>

#include "hhg/errors.hpp"
#include "hhg/material.hpp"
#include "hhg/units.hpp"
#include "oracles.hpp"

namespace hhg {
namespace {

TEST(Material, LnLikeGapAtGammaIs4p3eV) {
  const auto m = ln_like();
  const double gap = band_energy(m, Band::conduction, 0.0) - band_energy(m, Band::valence, 0.0);
  EXPECT_NEAR(units::hartree_to_ev(gap), 4.3, 1e-12);
}

TEST(Material, ZoneEdgesAgree) {
  for (const auto& m : {ln_like(), asi_like()}) {
    for (Band b : {Band::conduction, Band::valence}) {
      EXPECT_NEAR(band_energy(m, b, m.zone_edge()), band_energy(m, b, -m.zone_edge()), 1e-15);
    }
  }
}

TEST(Material, SingleCosineBandWidthIsTwiceCoefficient) {
  MaterialModel m = asi_like();
  const double delta = units::ev_to_hartree(0.7);
  m.cond_coeffs = {delta};
  EXPECT_NEAR(band_energy(m, Band::conduction, m.zone_edge()) - band_energy(m, Band::conduction, 0.0), 2.0 * delta,
              1e-15);
}

TEST(Material, PeriodicAndEvenBands) {
  MaterialModel m = ln_like();
  m.cond_coeffs = {0.03, -0.004, 0.001};
  m.val_coeffs = {0.02, 0.003};
  const double period = 2.0 * m.zone_edge();
  for (double k : {-0.3, -0.1, 0.05, 0.21, 0.33}) {
    for (Band b : {Band::conduction, Band::valence}) {
      EXPECT_NEAR(band_energy(m, b, k), band_energy(m, b, k + period), 1e-14);
      EXPECT_DOUBLE_EQ(band_energy(m, b, k), band_energy(m, b, -k));
    }
  }
}

TEST(Material, GroupVelocityVanishesAtCentreAndEdge) {
  const auto m = ln_like();
  for (Band b : {Band::conduction, Band::valence}) {
    EXPECT_DOUBLE_EQ(group_velocity(m, b, 0.0), 0.0);
    EXPECT_NEAR(group_velocity(m, b, m.zone_edge()), 0.0, 1e-15);
  }
}

TEST(Material, GroupVelocityMatchesFiniteDifference) {
  MaterialModel m = ln_like();
  m.cond_coeffs = {0.03, -0.004, 0.001};
  m.val_coeffs = {0.02, 0.003};
  const double h = 1e-4 * m.zone_edge();
  for (double frac : {-0.83, -0.41, 0.13, 0.37, 0.66, 0.91}) {
    const double k = frac * m.zone_edge();
    for (Band b : {Band::conduction, Band::valence}) {
      const double fd = oracle::central_difference([&](double x) { return band_energy(m, b, x); }, k, h);
      const double analytic = group_velocity(m, b, k);
      EXPECT_LT(std::abs(analytic - fd), 1e-6 * std::abs(analytic)) << "k = " << k;
    }
  }
}

TEST(Material, DipoleIsConstantByDefaultAndEven) {
  auto m = ln_like();
  EXPECT_EQ(dipole(m, 0.0), dipole(m, 0.2));
  m.dipole_width = 0.1;
  for (double k : {0.05, 0.17, 0.3}) EXPECT_DOUBLE_EQ(dipole(m, k), dipole(m, -k));
  EXPECT_NEAR(dipole(m, 0.1), 0.5 * m.dipole_scale, 1e-15);
}

TEST(Material, GapPositiveOnPresetGrids) {
  for (const auto& m : {ln_like(), asi_like()}) {
    for (int i = 0; i < 512; ++i) {
      const double k = -m.zone_edge() + 2.0 * m.zone_edge() * i / 512;
      EXPECT_GE(transition_energy(m, k), m.bandgap);
    }
  }
}

TEST(Material, UnknownBandIsConfigError) {
  EXPECT_THROW(parse_band("conductionish"), ConfigError);
  EXPECT_EQ(parse_band("cond"), Band::conduction);
  EXPECT_EQ(parse_band("val"), Band::valence);
}

TEST(Material, RejectsIndirectGap) {
  MaterialModel m = ln_like();
  m.cond_coeffs = {-0.05};
  EXPECT_THROW(validate(m), ConfigError);
}

TEST(Material, ConfigRoundTripPreservesBands) {
  MaterialModel m = ln_like();
  m.cond_coeffs = {0.03, -0.004, 0.001};
  m.dipole_width = 0.2;
  const auto again = material_from_config(to_config(m));
  for (int i = 0; i < 256; ++i) {
    const double k = -m.zone_edge() + 2.0 * m.zone_edge() * i / 256;
    for (Band b : {Band::conduction, Band::valence}) {
      const double ref = band_energy(m, b, k);
      EXPECT_NEAR(band_energy(again, b, k), ref, 1e-12 * std::abs(ref));
    }
    EXPECT_NEAR(dipole(again, k), dipole(m, k), 1e-12 * dipole(m, k));
  }
  EXPECT_EQ(again.name, m.name);
}

TEST(Material, ConfigRejectsUnknownKeysAndNamesThem) {
  nlohmann::json j = {{"preset", "ln-like"}, {"bandgap_eV", 3.0}};
  try {
    material_from_config(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "material.bandgap_eV");
  }
}

TEST(Material, PresetOverrides) {
  const auto m = material_from_config({{"preset", "asi-like"}, {"symmetry_break", 0.2}});
  EXPECT_EQ(m.name, "asi-like");
  EXPECT_DOUBLE_EQ(m.symmetry_break, 0.2);
  EXPECT_THROW(material_from_config({{"preset", "quartz"}}), ConfigError);
}

}  // namespace
}  // namespace hhg
