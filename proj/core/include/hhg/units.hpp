#pragma once

#include <numbers>

// Everything inside the solver runs in Hartree atomic units. Conversions to
// the laboratory units used in config files live here and nowhere else.
namespace hhg::units {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018
inline constexpr double hartree_ev = 27.211386245988;
inline constexpr double bohr_angstrom = 0.529177210903;
inline constexpr double au_time_fs = 0.024188843265857;
inline constexpr double au_field_v_per_angstrom = 51.422067476325;
inline constexpr double speed_of_light_au = 137.035999084;
inline constexpr double speed_of_light_si = 299792458.0;
inline constexpr double vacuum_permittivity_si = 8.8541878128e-12;
inline constexpr double hc_ev_nm = 1239.84198433;

constexpr double ev_to_hartree(double ev) { return ev / hartree_ev; }
constexpr double hartree_to_ev(double ha) { return ha * hartree_ev; }
constexpr double angstrom_to_bohr(double a) { return a / bohr_angstrom; }
constexpr double bohr_to_angstrom(double b) { return b * bohr_angstrom; }
constexpr double fs_to_au(double fs) { return fs / au_time_fs; }
constexpr double au_to_fs(double t) { return t * au_time_fs; }
constexpr double field_to_au(double v_per_angstrom) { return v_per_angstrom / au_field_v_per_angstrom; }
constexpr double field_to_v_per_angstrom(double au) { return au * au_field_v_per_angstrom; }

/// Angular frequency (a.u.) of light with the given vacuum wavelength in micrometres.
constexpr double angular_frequency_from_wavelength_um(double wavelength_um) {
  return 2.0 * pi * speed_of_light_au / angstrom_to_bohr(wavelength_um * 1.0e4);
}

}  // namespace hhg::units
