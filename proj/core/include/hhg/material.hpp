#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hhg {

enum class Band { conduction, valence };

/// Parses "cond"/"conduction" or "val"/"valence"; anything else is a ConfigError.
Band parse_band(std::string_view name);

/// Two-band 1D crystal. All fields are in atomic units.
///
/// The bands are cosine series anchored at the zone centre:
///   eps_c(k) =  gap/2 + sum_j c_j (1 - cos(j k a))
///   eps_v(k) = -gap/2 - sum_j v_j (1 - cos(j k a))
/// so the direct gap sits at k = 0 and equals `bandgap` there.
struct MaterialModel {
  std::string name;
  double lattice_constant = 0.0;     ///< bohr
  double bandgap = 0.0;              ///< hartree
  std::vector<double> cond_coeffs;   ///< hartree, j = 1, 2, ...
  std::vector<double> val_coeffs;    ///< hartree, j = 1, 2, ...
  double dipole_scale = 0.0;         ///< e * bohr
  double dipole_width = 0.0;         ///< 1/bohr; 0 selects a k-independent dipole
  /// Permanent-dipole difference between the bands, in units of dipole_scale.
  /// Zero keeps the model centrosymmetric (odd harmonics only).
  double symmetry_break = 0.0;

  double zone_edge() const;  ///< pi / a
};

/// Throws ConfigError if the model violates its invariants (positive gap and
/// lattice constant, gap(k) >= bandgap on a dense grid, finite coefficients).
void validate(const MaterialModel& material);

/// Maps k into [-pi/a, pi/a).
double reduce_to_zone(const MaterialModel& material, double k);

double band_energy(const MaterialModel& material, Band band, double k);
double group_velocity(const MaterialModel& material, Band band, double k);
double transition_energy(const MaterialModel& material, double k);
double dipole(const MaterialModel& material, double k);

/// Wide-gap polar preset (4.3 eV direct gap, symmetry broken).
MaterialModel ln_like();
/// Narrow-gap centrosymmetric preset (1.7 eV direct gap).
MaterialModel asi_like();
/// "ln-like" or "asi-like"; unknown names are a ConfigError.
MaterialModel material_preset(std::string_view name);

/// Config representation with laboratory units in the key names
/// (lattice_constant_angstrom, bandgap_ev, ...).
nlohmann::json to_config(const MaterialModel& material);
/// Accepts either {"preset": name, ...overrides} or a full definition.
/// Unknown keys are rejected.
MaterialModel material_from_config(const nlohmann::json& section);

}  // namespace hhg
