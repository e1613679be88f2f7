#include "hhg/material.hpp"

#include <cmath>
#include <set>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

// sum_j coeffs[j-1] * (1 - cos(j k a))
double cosine_series(const std::vector<double>& coeffs, double ka) {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    sum += coeffs[j] * (1.0 - std::cos(static_cast<double>(j + 1) * ka));
  }
  return sum;
}

// d/dk of the series above.
double cosine_series_slope(const std::vector<double>& coeffs, double ka, double a) {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double order = static_cast<double>(j + 1);
    sum += coeffs[j] * order * a * std::sin(order * ka);
  }
  return sum;
}

void require_finite(double value, const char* key) {
  if (!std::isfinite(value)) throw ConfigError("must be finite", key);
}

}  // namespace

Band parse_band(std::string_view name) {
  if (name == "cond" || name == "conduction" || name == "c") return Band::conduction;
  if (name == "val" || name == "valence" || name == "v") return Band::valence;
  throw ConfigError("unknown band identifier '" + std::string(name) + "'", "band");
}

double MaterialModel::zone_edge() const { return units::pi / lattice_constant; }

void validate(const MaterialModel& m) {
  require_finite(m.lattice_constant, "lattice_constant_angstrom");
  require_finite(m.bandgap, "bandgap_ev");
  require_finite(m.dipole_scale, "dipole_au");
  require_finite(m.dipole_width, "dipole_width_inv_angstrom");
  require_finite(m.symmetry_break, "symmetry_break");
  if (m.lattice_constant <= 0.0) throw ConfigError("must be positive", "lattice_constant_angstrom");
  if (m.bandgap <= 0.0) throw ConfigError("must be positive", "bandgap_ev");
  if (m.dipole_width < 0.0) throw ConfigError("must be >= 0", "dipole_width_inv_angstrom");
  for (double c : m.cond_coeffs) require_finite(c, "cond_coeffs_ev");
  for (double v : m.val_coeffs) require_finite(v, "val_coeffs_ev");

  // Direct gap at Gamma: the dispersion part of the gap must never go negative.
  constexpr int samples = 4096;
  for (int i = 0; i < samples; ++i) {
    const double k = -m.zone_edge() + 2.0 * m.zone_edge() * i / samples;
    if (transition_energy(m, k) < m.bandgap * (1.0 - 1e-12)) {
      throw ConfigError("band coefficients close the gap away from k = 0 (gap must be minimal at Gamma)",
                        "cond_coeffs_ev");
    }
  }
}

double reduce_to_zone(const MaterialModel& m, double k) {
  const double period = 2.0 * m.zone_edge();
  double r = std::fmod(k + m.zone_edge(), period);
  if (r < 0.0) r += period;
  return r - m.zone_edge();
}

double band_energy(const MaterialModel& m, Band band, double k) {
  const double ka = k * m.lattice_constant;
  switch (band) {
    case Band::conduction:
      return 0.5 * m.bandgap + cosine_series(m.cond_coeffs, ka);
    case Band::valence:
      return -0.5 * m.bandgap - cosine_series(m.val_coeffs, ka);
  }
  throw ConfigError("unknown band identifier", "band");
}

double group_velocity(const MaterialModel& m, Band band, double k) {
  const double ka = k * m.lattice_constant;
  switch (band) {
    case Band::conduction:
      return cosine_series_slope(m.cond_coeffs, ka, m.lattice_constant);
    case Band::valence:
      return -cosine_series_slope(m.val_coeffs, ka, m.lattice_constant);
  }
  throw ConfigError("unknown band identifier", "band");
}

double transition_energy(const MaterialModel& m, double k) {
  return band_energy(m, Band::conduction, k) - band_energy(m, Band::valence, k);
}

double dipole(const MaterialModel& m, double k) {
  if (m.dipole_width == 0.0) return m.dipole_scale;
  const double x = reduce_to_zone(m, k) / m.dipole_width;
  return m.dipole_scale / (1.0 + x * x);
}

MaterialModel ln_like() {
  MaterialModel m;
  m.name = "ln-like";
  m.lattice_constant = units::angstrom_to_bohr(5.0);
  m.bandgap = units::ev_to_hartree(4.3);
  m.cond_coeffs = {units::ev_to_hartree(1.0)};
  m.val_coeffs = {units::ev_to_hartree(0.6)};
  m.dipole_scale = 1.5;
  m.symmetry_break = 0.5;
  return m;
}

MaterialModel asi_like() {
  MaterialModel m;
  m.name = "asi-like";
  m.lattice_constant = units::angstrom_to_bohr(5.43);
  m.bandgap = units::ev_to_hartree(1.7);
  m.cond_coeffs = {units::ev_to_hartree(1.5)};
  m.val_coeffs = {units::ev_to_hartree(0.8)};
  m.dipole_scale = 1.5;
  m.symmetry_break = 0.0;
  return m;
}

MaterialModel material_preset(std::string_view name) {
  if (name == "ln-like") return ln_like();
  if (name == "asi-like") return asi_like();
  throw ConfigError("unknown material preset '" + std::string(name) + "'", "material.preset");
}

nlohmann::json to_config(const MaterialModel& m) {
  auto to_ev = [](const std::vector<double>& coeffs) {
    std::vector<double> out;
    out.reserve(coeffs.size());
    for (double c : coeffs) out.push_back(units::hartree_to_ev(c));
    return out;
  };
  return {
      {"name", m.name},
      {"lattice_constant_angstrom", units::bohr_to_angstrom(m.lattice_constant)},
      {"bandgap_ev", units::hartree_to_ev(m.bandgap)},
      {"cond_coeffs_ev", to_ev(m.cond_coeffs)},
      {"val_coeffs_ev", to_ev(m.val_coeffs)},
      {"dipole_au", m.dipole_scale},
      {"dipole_width_inv_angstrom", m.dipole_width / units::bohr_angstrom},
      {"symmetry_break", m.symmetry_break},
  };
}

MaterialModel material_from_config(const nlohmann::json& section) {
  static const std::set<std::string> known = {
      "preset", "name", "lattice_constant_angstrom", "bandgap_ev", "cond_coeffs_ev", "val_coeffs_ev",
      "dipole_au", "dipole_width_inv_angstrom", "symmetry_break"};
  if (!section.is_object()) throw ConfigError("must be an object", "material");
  for (const auto& [key, value] : section.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key", "material." + key);
  }

  MaterialModel m;
  if (section.contains("preset")) {
    if (!section["preset"].is_string()) throw ConfigError("must be a string", "material.preset");
    m = material_preset(section["preset"].get<std::string>());
  } else {
    for (const char* required : {"lattice_constant_angstrom", "bandgap_ev", "dipole_au"}) {
      if (!section.contains(required)) {
        throw ConfigError("required when no preset is given", std::string("material.") + required);
      }
    }
    m.name = "custom";
  }

  auto number = [&](const char* key) {
    const auto& v = section.at(key);
    if (!v.is_number()) throw ConfigError("must be a number", std::string("material.") + key);
    return v.get<double>();
  };
  auto series = [&](const char* key) {
    const auto& v = section.at(key);
    if (!v.is_array()) throw ConfigError("must be an array of numbers", std::string("material.") + key);
    std::vector<double> out;
    for (const auto& c : v) {
      if (!c.is_number()) throw ConfigError("must be an array of numbers", std::string("material.") + key);
      out.push_back(units::ev_to_hartree(c.get<double>()));
    }
    return out;
  };

  if (section.contains("name")) {
    if (!section["name"].is_string()) throw ConfigError("must be a string", "material.name");
    m.name = section["name"].get<std::string>();
  }
  if (section.contains("lattice_constant_angstrom"))
    m.lattice_constant = units::angstrom_to_bohr(number("lattice_constant_angstrom"));
  if (section.contains("bandgap_ev")) m.bandgap = units::ev_to_hartree(number("bandgap_ev"));
  if (section.contains("cond_coeffs_ev")) m.cond_coeffs = series("cond_coeffs_ev");
  if (section.contains("val_coeffs_ev")) m.val_coeffs = series("val_coeffs_ev");
  if (section.contains("dipole_au")) m.dipole_scale = number("dipole_au");
  if (section.contains("dipole_width_inv_angstrom"))
    m.dipole_width = number("dipole_width_inv_angstrom") * units::bohr_angstrom;
  if (section.contains("symmetry_break")) m.symmetry_break = number("symmetry_break");

  try {
    validate(m);
  } catch (const ConfigError& e) {
    throw ConfigError(e.detail() + " (material '" + m.name + "')",
                      e.key().empty() ? "material" : "material." + e.key());
  }
  return m;
}

}  // namespace hhg
