#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hhg/errors.hpp"

namespace hhg::runner {
namespace {

using nlohmann::json;

std::string dotted(std::string_view prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

void require_object(const json& j, std::string_view prefix) {
  if (!j.is_object()) throw ConfigError("must be an object", std::string(prefix));
}

void require_known(const json& j, std::string_view prefix, std::initializer_list<std::string_view> keys) {
  require_object(j, prefix);
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (auto k : keys) found = found || k == key;
    if (!found) throw ConfigError("unknown key", dotted(prefix, key));
  }
}

double number(const json& j, std::string_view prefix, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("must be a number", dotted(prefix, key));
  return v.get<double>();
}

long long integer(const json& j, std::string_view prefix, const char* key, long long fallback, long long min_value) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("must be an integer", dotted(prefix, key));
  const auto value = v.get<long long>();
  if (value < min_value) throw ConfigError("must be >= " + std::to_string(min_value), dotted(prefix, key));
  return value;
}

std::string text(const json& j, std::string_view prefix, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError("must be a string", dotted(prefix, key));
  return v.get<std::string>();
}

bool flag(const json& j, std::string_view prefix, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError("must be true or false", dotted(prefix, key));
  return v.get<bool>();
}

std::vector<double> numbers(const json& j, std::string_view prefix, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError("must be an array of numbers", dotted(prefix, key));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("must be an array of numbers", dotted(prefix, key));
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> integers(const json& j, std::string_view prefix, const char* key, std::vector<int> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError("must be an array of integers", dotted(prefix, key));
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<long long>() < 1) {
      throw ConfigError("must be an array of positive integers", dotted(prefix, key));
    }
    out.push_back(x.get<int>());
  }
  return out;
}

const json& section_or_empty(const json& doc, const char* key) {
  static const json empty = json::object();
  return doc.contains(key) ? doc.at(key) : empty;
}

json expand_material(const json& section) {
  require_object(section, "material");
  if (!section.contains("preset")) return section;
  if (!section["preset"].is_string()) throw ConfigError("must be a string", "material.preset");
  json expanded = to_config(material_preset(section["preset"].get<std::string>()));
  for (const auto& [key, value] : section.items()) {
    if (key != "preset") expanded[key] = value;
  }
  return expanded;
}

void parse_solver(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "solver";
  require_known(s, p, {"t2_cycles", "frame", "k_points", "substeps"});
  auto& solver = c.solver;
  if (s.contains("t2_cycles")) {
    const auto& v = s["t2_cycles"];
    if (v.is_string() && (v == "infinity" || v == "inf")) {
      solver.t2_cycles = std::numeric_limits<double>::infinity();
    } else if (v.is_number()) {
      solver.t2_cycles = v.get<double>();
    } else {
      throw ConfigError("must be a number or \"infinity\"", "solver.t2_cycles");
    }
  }
  solver.frame = parse_frame(text(s, p, "frame", "moving"));
  solver.k_points = static_cast<int>(integer(s, p, "k_points", solver.k_points, KGrid::min_points));
  solver.substeps = static_cast<int>(integer(s, p, "substeps", solver.substeps, 1));
  validate(solver);
  eff["solver"] = {
      {"t2_cycles", std::isinf(solver.t2_cycles) ? json("infinity") : json(solver.t2_cycles)},
      {"frame", std::string(to_string(solver.frame))},
      {"k_points", solver.k_points},
      {"substeps", solver.substeps},
  };
}

void parse_spectrum(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "spectrum";
  require_known(s, p, {"window", "combination", "pad_factor", "half_width", "harmonics", "normalize"});
  auto& sp = c.spectrum;
  sp.options.window = parse_window(text(s, p, "window", "hann"));
  sp.options.combination = parse_combination(text(s, p, "combination", "literal"));
  sp.options.pad_factor = static_cast<int>(integer(s, p, "pad_factor", 1, 1));
  sp.half_width = number(s, p, "half_width", sp.half_width);
  if (!(sp.half_width > 0.0 && sp.half_width <= 0.5)) throw ConfigError("must lie in (0, 0.5]", "spectrum.half_width");
  sp.harmonics = integers(s, p, "harmonics", sp.harmonics);
  const auto norm = text(s, p, "normalize", "reference-fundamental");
  if (norm != "reference-fundamental" && norm != "none") {
    throw ConfigError("expected 'reference-fundamental' or 'none'", "spectrum.normalize");
  }
  sp.normalize_to_reference = norm == "reference-fundamental";
  eff["spectrum"] = {
      {"window", std::string(to_string(sp.options.window))},
      {"combination", std::string(to_string(sp.options.combination))},
      {"pad_factor", sp.options.pad_factor},
      {"half_width", sp.half_width},
      {"harmonics", sp.harmonics},
      {"normalize", norm},
  };
}

void parse_quantum(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "quantum";
  require_known(s, p, {"mean_photon_number", "squeeze_parameter", "nodes", "cutoff_sigma"});
  auto& q = c.quantum;
  if (s.contains("mean_photon_number") && s.contains("squeeze_parameter")) {
    throw ConfigError("give mean_photon_number or squeeze_parameter, not both", "quantum.squeeze_parameter");
  }
  if (s.contains("squeeze_parameter")) {
    q.squeeze_parameter = number(s, p, "squeeze_parameter", 0.0);
    if (!(*q.squeeze_parameter >= 0.0)) throw ConfigError("must be >= 0", "quantum.squeeze_parameter");
  } else {
    q.mean_photon_number = number(s, p, "mean_photon_number", 2e12);
    if (!(*q.mean_photon_number > 0.0)) throw ConfigError("must be positive", "quantum.mean_photon_number");
  }
  q.nodes = static_cast<int>(integer(s, p, "nodes", q.nodes, 2));
  q.cutoff_sigma = number(s, p, "cutoff_sigma", 0.0);
  if (q.cutoff_sigma < 0.0) throw ConfigError("must be >= 0 (0 selects the default)", "quantum.cutoff_sigma");
  if (q.cutoff_sigma == 0.0) q.cutoff_sigma = default_quadrature_cutoff(q.nodes);
  json out = {{"nodes", q.nodes}, {"cutoff_sigma", q.cutoff_sigma}};
  if (q.squeeze_parameter) out["squeeze_parameter"] = *q.squeeze_parameter;
  if (q.mean_photon_number) out["mean_photon_number"] = *q.mean_photon_number;
  eff["quantum"] = out;
}

void parse_shots(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "shots";
  require_known(s, p, {"count", "harmonic", "yield_map", "power_law_order", "map_points", "map_min_sigma",
                       "map_max_sigma", "noise_model", "noise_sigma", "pump_bins", "harmonic_bins", "mean_scales",
                       "write_shots"});
  auto& sh = c.shots;
  sh.count = static_cast<std::size_t>(integer(s, p, "count", static_cast<long long>(sh.count), 1));
  sh.harmonic = static_cast<int>(integer(s, p, "harmonic", sh.harmonic, 1));
  sh.yield_map = text(s, p, "yield_map", sh.yield_map);
  if (sh.yield_map != "sbe" && sh.yield_map != "power-law") {
    throw ConfigError("expected 'sbe' or 'power-law'", "shots.yield_map");
  }
  sh.power_law_order = static_cast<int>(integer(s, p, "power_law_order", sh.power_law_order, 1));
  sh.map_points = static_cast<int>(integer(s, p, "map_points", sh.map_points, 2));
  sh.map_min_sigma = number(s, p, "map_min_sigma", sh.map_min_sigma);
  sh.map_max_sigma = number(s, p, "map_max_sigma", sh.map_max_sigma);
  if (!(sh.map_min_sigma > 0.0 && sh.map_max_sigma > sh.map_min_sigma)) {
    throw ConfigError("need 0 < map_min_sigma < map_max_sigma", "shots.map_max_sigma");
  }
  const auto noise = text(s, p, "noise_model", "none");
  sh.noise_model = parse_noise_model(noise);
  sh.noise_sigma = number(s, p, "noise_sigma", 0.0);
  if (!(sh.noise_sigma >= 0.0)) throw ConfigError("must be >= 0", "shots.noise_sigma");
  sh.pump_bins = static_cast<std::size_t>(integer(s, p, "pump_bins", static_cast<long long>(sh.pump_bins), 3));
  sh.harmonic_bins =
      static_cast<std::size_t>(integer(s, p, "harmonic_bins", static_cast<long long>(sh.harmonic_bins), 1));
  sh.mean_scales = numbers(s, p, "mean_scales", sh.mean_scales);
  if (sh.mean_scales.empty()) throw ConfigError("must not be empty", "shots.mean_scales");
  for (double m : sh.mean_scales) {
    if (!(m > 0.0)) throw ConfigError("entries must be positive", "shots.mean_scales");
  }
  sh.write_shots = flag(s, p, "write_shots", false);
  eff["shots"] = {
      {"count", sh.count},
      {"harmonic", sh.harmonic},
      {"yield_map", sh.yield_map},
      {"power_law_order", sh.power_law_order},
      {"map_points", sh.map_points},
      {"map_min_sigma", sh.map_min_sigma},
      {"map_max_sigma", sh.map_max_sigma},
      {"noise_model", sh.noise_model == NoiseModel::none ? "none" : "gaussian-detector"},
      {"noise_sigma", sh.noise_sigma},
      {"pump_bins", sh.pump_bins},
      {"harmonic_bins", sh.harmonic_bins},
      {"mean_scales", sh.mean_scales},
      {"write_shots", sh.write_shots},
  };
}

std::vector<double> intensity_range(const json& r) {
  constexpr std::string_view p = "scan.intensity_range_tw_cm2";
  require_known(r, p, {"start", "stop", "points", "spacing"});
  const double start = number(r, p, "start", 0.1);
  const double stop = number(r, p, "stop", 10.0);
  const auto points = integer(r, p, "points", 12, 2);
  const auto spacing = text(r, p, "spacing", "log");
  if (spacing != "log" && spacing != "linear") throw ConfigError("expected 'log' or 'linear'", dotted(p, "spacing"));
  if (!(stop > start) || (spacing == "log" && !(start > 0.0))) {
    throw ConfigError("need 0 < start < stop", dotted(p, "stop"));
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  for (long long i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(points - 1);
    out[static_cast<std::size_t>(i)] = spacing == "log" ? start * std::pow(stop / start, u) : start + (stop - start) * u;
  }
  out.back() = stop;
  return out;
}

void parse_scan(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "scan";
  require_known(s, p, {"intensities_tw_cm2", "intensity_range_tw_cm2", "harmonics", "fit_windows",
                       "coherent_damage_cutoff_tw_cm2"});
  auto& sc = c.scan;
  if (s.contains("intensities_tw_cm2") && s.contains("intensity_range_tw_cm2")) {
    throw ConfigError("give intensities_tw_cm2 or intensity_range_tw_cm2, not both", "scan.intensity_range_tw_cm2");
  }
  if (s.contains("intensity_range_tw_cm2")) {
    sc.intensities_tw_cm2 = intensity_range(s["intensity_range_tw_cm2"]);
  } else {
    sc.intensities_tw_cm2 = numbers(s, p, "intensities_tw_cm2", intensity_range(json::object()));
  }
  for (std::size_t i = 0; i < sc.intensities_tw_cm2.size(); ++i) {
    if (!(sc.intensities_tw_cm2[i] > 0.0)) throw ConfigError("intensities must be positive", "scan.intensities_tw_cm2");
    if (i > 0 && !(sc.intensities_tw_cm2[i] > sc.intensities_tw_cm2[i - 1])) {
      throw ConfigError("intensities must increase strictly", "scan.intensities_tw_cm2");
    }
  }
  sc.harmonics = integers(s, p, "harmonics", sc.harmonics);
  json windows = json::array();
  if (s.contains("fit_windows")) {
    if (!s["fit_windows"].is_array()) throw ConfigError("must be an array", "scan.fit_windows");
    std::size_t index = 0;
    for (const auto& w : s["fit_windows"]) {
      const std::string wp = "scan.fit_windows[" + std::to_string(index++) + "]";
      require_known(w, wp, {"harmonic", "driver", "lower_tw_cm2", "upper_tw_cm2"});
      FitWindow fw;
      fw.harmonic = static_cast<int>(integer(w, wp, "harmonic", 0, 1));
      if (!w.contains("harmonic")) throw ConfigError("required", dotted(wp, "harmonic"));
      fw.driver = parse_driver(text(w, wp, "driver", "coherent"));
      fw.lower_tw_cm2 = number(w, wp, "lower_tw_cm2", 0.0);
      fw.upper_tw_cm2 = number(w, wp, "upper_tw_cm2", std::numeric_limits<double>::max());
      if (!(fw.upper_tw_cm2 > fw.lower_tw_cm2)) throw ConfigError("need lower < upper", dotted(wp, "upper_tw_cm2"));
      sc.fit_windows.push_back(fw);
      windows.push_back({{"harmonic", fw.harmonic},
                         {"driver", std::string(to_string(fw.driver))},
                         {"lower_tw_cm2", fw.lower_tw_cm2},
                         {"upper_tw_cm2", fw.upper_tw_cm2}});
    }
  }
  json cutoff = nullptr;
  if (s.contains("coherent_damage_cutoff_tw_cm2") && !s["coherent_damage_cutoff_tw_cm2"].is_null()) {
    sc.coherent_damage_cutoff_tw_cm2 = number(s, p, "coherent_damage_cutoff_tw_cm2", 0.0);
    if (!(*sc.coherent_damage_cutoff_tw_cm2 > 0.0)) {
      throw ConfigError("must be positive", "scan.coherent_damage_cutoff_tw_cm2");
    }
    cutoff = *sc.coherent_damage_cutoff_tw_cm2;
  }
  eff["scan"] = {
      {"intensities_tw_cm2", sc.intensities_tw_cm2},
      {"harmonics", sc.harmonics},
      {"fit_windows", windows},
      {"coherent_damage_cutoff_tw_cm2", cutoff},
  };
}

void parse_output(const json& s, RunConfig& c, json& eff) {
  constexpr std::string_view p = "output";
  require_known(s, p, {"directory", "trajectory_stride"});
  c.output.directory = text(s, p, "directory", "");
  c.output.trajectory_stride =
      static_cast<std::size_t>(integer(s, p, "trajectory_stride", 0, 0));
  eff["output"] = {{"directory", c.output.directory}, {"trajectory_stride", c.output.trajectory_stride}};
}

}  // namespace

SqueezedVacuumState QuantumConfig::state() const {
  return squeeze_parameter ? SqueezedVacuumState::from_squeeze_parameter(*squeeze_parameter)
                           : SqueezedVacuumState::from_mean_photon_number(*mean_photon_number);
}

RunConfig parse_config(const json& doc) {
  require_known(doc, "", {"material", "pulse", "bsv_pulse", "solver", "spectrum", "quantum", "shots", "scan", "output",
                          "seed", "workers"});
  RunConfig c;
  json eff = json::object();

  const json material = expand_material(section_or_empty(doc, "material").empty()
                                            ? json{{"preset", "ln-like"}}
                                            : section_or_empty(doc, "material"));
  c.material = material_from_config(material);
  eff["material"] = material;

  PulseSpec coherent_defaults;
  coherent_defaults.peak_intensity_tw_cm2 = 2.0;
  c.pulse = pulse_from_config(section_or_empty(doc, "pulse"), coherent_defaults, "pulse");
  eff["pulse"] = to_config(c.pulse);

  PulseSpec bsv_defaults = c.pulse;
  bsv_defaults.fwhm_fs = 25.0;
  if (c.pulse.time_window_fs > 0.0 && c.pulse.time_window_fs < PulseSpec::min_window_fwhm * 25.0) {
    bsv_defaults.time_window_fs = 0.0;
  }
  c.bsv_pulse = pulse_from_config(section_or_empty(doc, "bsv_pulse"), bsv_defaults, "bsv_pulse");
  eff["bsv_pulse"] = to_config(c.bsv_pulse);

  parse_solver(section_or_empty(doc, "solver"), c, eff);
  parse_spectrum(section_or_empty(doc, "spectrum"), c, eff);
  parse_quantum(section_or_empty(doc, "quantum"), c, eff);
  parse_shots(section_or_empty(doc, "shots"), c, eff);
  parse_scan(section_or_empty(doc, "scan"), c, eff);
  parse_output(section_or_empty(doc, "output"), c, eff);

  if (doc.contains("seed")) {
    const auto& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("must be a non-negative integer", "seed");
    }
    c.seed = v.get<std::uint64_t>();
  }
  eff["seed"] = c.seed;
  c.workers = static_cast<int>(integer(doc, "", "workers", 0, 0));
  eff["workers"] = c.workers;

  c.effective = std::move(eff);
  return c;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("not valid JSON: ") + e.what(), path);
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value", std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("empty path component in override", key);
    if (!node->is_object()) throw ConfigError("override path crosses a non-object value", key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string config_hash(const RunConfig& config) {
  json copy = config.effective;
  if (copy.contains("output")) copy["output"].erase("directory");
  copy.erase("workers");
  const std::string text = copy.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a64:") + buf;
}

}  // namespace hhg::runner
