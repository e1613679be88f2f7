#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hhg/field.hpp"
#include "hhg/material.hpp"
#include "hhg/quantum_light.hpp"
#include "hhg/sbe.hpp"
#include "hhg/spectrum.hpp"
#include "hhg/statistics.hpp"

namespace hhg::runner {

struct SpectrumConfig {
  SpectrumOptions options;
  double half_width = 0.5;
  std::vector<int> harmonics = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  /// Scale spectra so the reference coherent run's fundamental peak is 1.
  bool normalize_to_reference = true;
};

struct QuantumConfig {
  std::optional<double> mean_photon_number;
  std::optional<double> squeeze_parameter;
  int nodes = default_quadrature_nodes;
  double cutoff_sigma = 0.0;  ///< 0 selects the node-count default

  SqueezedVacuumState state() const;
};

struct ShotsConfig {
  std::size_t count = 200000;
  int harmonic = 5;
  std::string yield_map = "sbe";  ///< "sbe" or "power-law"
  int power_law_order = 5;
  int map_points = 16;
  double map_min_sigma = 0.05;
  double map_max_sigma = 4.0;
  NoiseModel noise_model = NoiseModel::none;
  double noise_sigma = 0.0;
  std::size_t pump_bins = 40;
  std::size_t harmonic_bins = 200;
  std::vector<double> mean_scales = {1.0};
  bool write_shots = false;
};

struct FitWindow {
  int harmonic = 0;
  Driver driver = Driver::coherent;
  double lower_tw_cm2 = 0.0;
  double upper_tw_cm2 = 0.0;
};

struct ScanConfig {
  std::vector<double> intensities_tw_cm2;
  std::vector<int> harmonics = {5, 7};
  std::vector<FitWindow> fit_windows;
  std::optional<double> coherent_damage_cutoff_tw_cm2;
};

struct OutputConfig {
  std::string directory;
  std::size_t trajectory_stride = 0;  ///< 0 disables the (large) trajectory dump
};

/// Fully validated run configuration. `effective` is the canonical JSON form:
/// every default filled in, presets expanded. Parsing `effective` again gives
/// an identical RunConfig.
struct RunConfig {
  MaterialModel material;
  PulseSpec pulse;
  PulseSpec bsv_pulse;
  SolverParams solver;
  SpectrumConfig spectrum;
  QuantumConfig quantum;
  ShotsConfig shots;
  ScanConfig scan;
  OutputConfig output;
  std::uint64_t seed = 20240611;
  int workers = 0;  ///< 0: available parallelism

  nlohmann::json effective;
};

/// Validates and expands a config document. Unknown keys anywhere are a
/// ConfigError naming the dotted key.
RunConfig parse_config(const nlohmann::json& document);

/// Reads a JSON config file (IoError if unreadable, ConfigError if malformed).
nlohmann::json load_config_file(const std::string& path);

/// Applies `key.path=value` overrides. The value is parsed as JSON when it
/// is valid JSON and taken as a string otherwise.
void apply_override(nlohmann::json& document, std::string_view assignment);

/// FNV-1a 64 of the effective config (output directory excluded), as hex.
std::string config_hash(const RunConfig& config);

}  // namespace hhg::runner
