#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"

namespace hhg::runner {
namespace {

using nlohmann::json;

std::ostream& log_of(const CommandContext& ctx) { return *ctx.log; }

SpectrumOptions spectrum_options(const RunConfig& c) { return c.spectrum.options; }

json source_extras(const SpectrumRecord& s) {
  return {
      {"material", s.source.material},
      {"peak_field_au", s.source.peak_field},
      {"peak_field_v_per_angstrom", units::field_to_v_per_angstrom(s.source.peak_field)},
      {"fwhm_fs", s.source.fwhm_fs},
      {"quadrature_nodes", s.source.quadrature_nodes},
      {"window", std::string(to_string(s.window))},
      {"combination", std::string(to_string(s.combination))},
      {"pad_factor", s.pad_factor},
      {"normalization", s.normalization},
      {"carrier_frequency_au", s.carrier_frequency},
  };
}

void write_spectrum(const CommandContext& ctx, const std::string& file, const std::string& kind,
                    const SpectrumRecord& s, const json& extra = json::object()) {
  CsvTable table(kind, {"harmonic_order", "S"});
  table.extras() = source_extras(s);
  for (const auto& [k, v] : extra.items()) table.extras()[k] = v;
  for (std::size_t i = 0; i < s.size(); ++i) table.add_row({s.order[i], s.density[i]});
  table.write(ctx.out / file, ctx.provenance);
}

double normalization_for(const RunConfig& c, const SpectrumRecord& reference) {
  return c.spectrum.normalize_to_reference ? reference_normalization(reference) : 1.0;
}

/// Pump photons per TW/cm^2: the configured mean photon number belongs to the
/// BSV pulse's mean intensity (1 TW/cm^2 if that pulse is dark).
double photons_per_intensity(const RunConfig& c) {
  const double mean = c.quantum.state().mean_photon_number();
  const double reference = intensity_tw_cm2(c.bsv_pulse);
  return reference > 0.0 ? mean / reference : mean;
}

std::string scaling_file(Driver driver, int order) {
  return "scaling_" + std::string(to_string(driver)) + "_q" + std::to_string(order) + ".csv";
}

}  // namespace

void simulate_coherent(const CommandContext& ctx) {
  const auto& c = ctx.config;
  SolverParams solver = c.solver;
  solver.snapshot_stride = c.output.trajectory_stride;
  auto run = run_coherent(c.material, c.pulse, solver, spectrum_options(c));
  const double norm = normalization_for(c, run.spectrum);
  const auto spectrum = rescaled(run.spectrum, norm);
  write_spectrum(ctx, "spectrum_coherent.csv", "spectrum", spectrum, {{"driver", "coherent"}});

  CsvTable yields("yields", {"q", "yield"});
  yields.extras()["driver"] = "coherent";
  yields.extras()["half_width"] = c.spectrum.half_width;
  json yield_json = json::object();
  for (int q : c.spectrum.harmonics) {
    const double y = harmonic_yield(spectrum, q, c.spectrum.half_width);
    yields.add_row({static_cast<double>(q), y});
    yield_json[std::to_string(q)] = y;
  }
  yields.write(ctx.out / "yields_coherent.csv", ctx.provenance);

  CsvTable field("field", {"t_fs", "E_VperA", "A_au"});
  for (std::size_t i = 0; i < run.field.size(); ++i) {
    field.add_row({units::au_to_fs(run.field.time[i]), units::field_to_v_per_angstrom(run.field.field[i]),
                   run.field.vector_potential[i]});
  }
  field.write(ctx.out / "field.csv", ctx.provenance);

  CsvTable currents("currents", {"t_fs", "J_inter", "J_intra"});
  const auto& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.time.size(); ++i) {
    currents.add_row({units::au_to_fs(tr.time[i]), tr.interband[i], tr.intraband[i]});
  }
  currents.extras()["frame"] = std::string(to_string(tr.frame));
  currents.extras()["t2_au"] = std::isinf(tr.t2) ? json("infinity") : json(tr.t2);
  currents.extras()["dt_au"] = tr.dt;
  currents.write(ctx.out / "currents.csv", ctx.provenance);

  if (!tr.snapshots.empty()) {
    log_of(ctx) << "warning: trajectory dump enabled; trajectory.csv holds " << tr.snapshots.size() << " x "
                << tr.k_points << " rows\n";
    const KGrid grid(tr.k_points, c.material.lattice_constant);
    CsvTable traj("trajectory", {"t_fs", "k_au", "ReP", "ImP", "f_e"});
    traj.extras()["stride"] = c.output.trajectory_stride;
    for (const auto& snap : tr.snapshots) {
      for (int k = 0; k < grid.size(); ++k) {
        traj.add_row({units::au_to_fs(snap.time), grid[k], snap.polarization[k].real(), snap.polarization[k].imag(),
                      snap.population[k]});
      }
    }
    traj.write(ctx.out / "trajectory.csv", ctx.provenance);
  }

  write_json(ctx.out / "summary.json",
             {{"subcommand", "simulate-coherent"},
              {"yields", yield_json},
              {"normalization", norm},
              {"max_population", tr.max_population},
              {"max_purity_excess", tr.max_purity_excess}},
             ctx.provenance, "summary");
  log_of(ctx) << "simulate-coherent: " << run.spectrum.size() << " spectral bins, max f_e "
              << format_number(tr.max_population) << "\n";
}

void simulate_bsv(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto opts = spectrum_options(c);
  // Reference: coherent drive with the BSV pulse shape at the BSV mean intensity.
  const auto reference = run_coherent(c.material, c.bsv_pulse, c.solver, opts);
  const double norm = normalization_for(c, reference.spectrum);
  const auto bsv = run_bsv(c.material, c.bsv_pulse, c.solver, opts, c.quantum.nodes, c.quantum.cutoff_sigma, c.workers);

  const auto bsv_spectrum = rescaled(bsv.average, norm);
  const auto coherent_spectrum = rescaled(reference.spectrum, norm);
  write_spectrum(ctx, "spectrum_bsv.csv", "spectrum", bsv_spectrum,
                 {{"driver", "bsv"}, {"sigma_au", bsv.rule.scale}, {"cutoff_sigma", bsv.rule.cutoff}});
  write_spectrum(ctx, "spectrum_coherent_reference.csv", "spectrum", coherent_spectrum, {{"driver", "coherent"}});

  CsvTable enhancement("enhancement", {"q", "yield_bsv", "yield_coherent", "enhancement"});
  enhancement.extras()["half_width"] = c.spectrum.half_width;
  json rows = json::array();
  for (int q : c.spectrum.harmonics) {
    const double yb = harmonic_yield(bsv_spectrum, q, c.spectrum.half_width);
    const double yc = harmonic_yield(coherent_spectrum, q, c.spectrum.half_width);
    const double ratio = yc > 0.0 ? yb / yc : std::nan("");
    enhancement.add_row({static_cast<double>(q), yb, yc, ratio});
    rows.push_back({{"q", q}, {"enhancement", std::isnan(ratio) ? json(nullptr) : json(ratio)}});
  }
  enhancement.write(ctx.out / "enhancement.csv", ctx.provenance);

  CsvTable quadrature("quadrature", {"node", "amplitude_au", "amplitude_over_sigma", "weight"});
  quadrature.extras()["sigma_au"] = bsv.rule.scale;
  quadrature.extras()["cutoff_sigma"] = bsv.rule.cutoff;
  for (std::size_t j = 0; j < bsv.rule.size(); ++j) {
    quadrature.add_row({static_cast<double>(j), bsv.rule.nodes[j], bsv.rule.nodes[j] / bsv.rule.scale,
                        bsv.rule.weights[j]});
  }
  quadrature.write(ctx.out / "quadrature.csv", ctx.provenance);

  write_json(ctx.out / "summary.json",
             {{"subcommand", "simulate-bsv"},
              {"enhancement", rows},
              {"normalization", norm},
              {"max_population", std::max(bsv.max_population, reference.trajectory.max_population)},
              {"max_purity_excess", std::max(bsv.max_purity_excess, reference.trajectory.max_purity_excess)}},
             ctx.provenance, "summary");
  log_of(ctx) << "simulate-bsv: " << bsv.rule.size() << " quadrature runs\n";
}

void scan_power(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto opts = spectrum_options(c);
  const auto& grid = c.scan.intensities_tw_cm2;
  const auto& orders = c.scan.harmonics;
  const double norm =
      c.spectrum.normalize_to_reference ? reference_normalization(run_coherent(c.material, c.pulse, c.solver, opts).spectrum)
                                        : 1.0;
  const double calibration = photons_per_intensity(c);

  std::size_t coherent_points = grid.size();
  if (c.scan.coherent_damage_cutoff_tw_cm2) {
    coherent_points = static_cast<std::size_t>(
        std::upper_bound(grid.begin(), grid.end(), *c.scan.coherent_damage_cutoff_tw_cm2) - grid.begin());
  }

  // One flat task list: coherent points first, then (intensity, node) pairs,
  // so a single pool serves the whole scan.
  std::vector<QuadratureRule> rules;
  for (double intensity : grid) {
    const double sigma = peak_field_au(at_intensity(c.bsv_pulse, intensity));
    rules.push_back(husimi_quadrature(AmplitudeDistribution{sigma}, c.quantum.nodes, c.quantum.cutoff_sigma));
  }
  struct Task {
    std::size_t point;
    int node;  ///< -1 for coherent
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < coherent_points; ++i) tasks.push_back({i, -1});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < rules[i].size(); ++j) tasks.push_back({i, static_cast<int>(j)});
  }
  std::vector<std::vector<double>> yields(tasks.size());
  std::vector<double> population(tasks.size());
  SolverParams solver = c.solver;
  solver.snapshot_stride = 0;
  parallel_for(tasks.size(), c.workers, [&](std::size_t t) {
    const auto& task = tasks[t];
    const PulseSpec pulse = task.node < 0 ? at_intensity(c.pulse, grid[task.point])
                                          : at_peak_field(c.bsv_pulse, rules[task.point].nodes[task.node]);
    const auto run = run_coherent(c.material, pulse, solver, opts);
    population[t] = run.trajectory.max_population;
    for (int q : orders) yields[t].push_back(norm * harmonic_yield(run.spectrum, q, c.spectrum.half_width));
  });

  json points = json::array();
  for (std::size_t h = 0; h < orders.size(); ++h) {
    CsvTable coherent("scaling", {"intensity_tw_cm2", "pump_photons", "yield_mean", "yield_variance"});
    CsvTable bsv("scaling", {"intensity_tw_cm2", "pump_photons", "yield_mean", "yield_variance"});
    for (auto* table : {&coherent, &bsv}) {
      table->extras()["order"] = orders[h];
      table->extras()["half_width"] = c.spectrum.half_width;
      table->extras()["photons_per_tw_cm2"] = calibration;
    }
    coherent.extras()["driver"] = "coherent";
    coherent.extras()["damage_cutoff_tw_cm2"] =
        c.scan.coherent_damage_cutoff_tw_cm2 ? json(*c.scan.coherent_damage_cutoff_tw_cm2) : json(nullptr);
    coherent.extras()["fwhm_fs"] = c.pulse.fwhm_fs;
    bsv.extras()["driver"] = "bsv";
    bsv.extras()["fwhm_fs"] = c.bsv_pulse.fwhm_fs;
    bsv.extras()["quadrature_nodes"] = c.quantum.nodes;

    std::size_t t = 0;
    for (; t < coherent_points; ++t) {
      const double I = grid[tasks[t].point];
      coherent.add_row({I, calibration * I, yields[t][h], 0.0});
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double mean = 0.0, second = 0.0;
      for (std::size_t j = 0; j < rules[i].size(); ++j, ++t) {
        mean += rules[i].weights[j] * yields[t][h];
        second += rules[i].weights[j] * yields[t][h] * yields[t][h];
      }
      bsv.add_row({grid[i], calibration * grid[i], mean, std::max(0.0, second - mean * mean)});
    }
    coherent.write(ctx.out / scaling_file(Driver::coherent, orders[h]), ctx.provenance);
    bsv.write(ctx.out / scaling_file(Driver::bsv, orders[h]), ctx.provenance);
  }

  // Peak excitation per scan point, useful for choosing perturbative fit windows.
  std::size_t t = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json p = {{"intensity_tw_cm2", grid[i]}};
    if (i < coherent_points) p["coherent_max_population"] = population[t++];
    points.push_back(p);
  }
  t = coherent_points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < rules[i].size(); ++j, ++t) worst = std::max(worst, population[t]);
    points[i]["bsv_max_population"] = worst;
  }
  write_json(ctx.out / "scan_summary.json",
             {{"subcommand", "scan-power"}, {"normalization", norm}, {"coherent_points", coherent_points},
              {"points", points}},
             ctx.provenance, "summary");
  log_of(ctx) << "scan-power: " << tasks.size() << " SBE runs over " << grid.size() << " intensities ("
              << coherent_points << " coherent)\n";
}

void sample_shots(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto& sh = c.shots;
  const double sigma = peak_field_au(c.bsv_pulse);
  if (!(sigma > 0.0)) throw ConfigError("sample-shots needs a non-zero BSV intensity", "bsv_pulse.peak_intensity_tw_cm2");
  const double mean_photons = c.quantum.state().mean_photon_number();
  const double photons_per_amplitude2 = mean_photons / (sigma * sigma);

  const auto factors = geometric_points(sh.map_min_sigma, sh.map_max_sigma, sh.map_points);
  std::function<double(double)> map;
  std::vector<double> map_amplitudes, map_yields;
  if (sh.yield_map == "sbe") {
    const auto opts = spectrum_options(c);
    const double norm = normalization_for(c, run_coherent(c.material, c.bsv_pulse, c.solver, opts).spectrum);
    YieldMap table = tabulate_yield_map(c.material, c.bsv_pulse, c.solver, opts, sigma, factors, sh.harmonic,
                                        c.spectrum.half_width, norm, c.workers);
    map_amplitudes = table.amplitudes();
    map_yields = table.yields();
    if (std::any_of(map_yields.begin(), map_yields.end(), [](double y) { return !(y > 0.0); })) {
      throw RangeError("tabulated yield map has non-positive entries; widen shots.map_min_sigma or raise intensity");
    }
    map = [table = std::move(table)](double e) { return table(e); };
  } else {
    const double power = 2.0 * sh.power_law_order;
    map = [sigma, power](double e) { return std::pow(e / sigma, power); };
    for (double f : factors) {
      map_amplitudes.push_back(sigma * f);
      map_yields.push_back(map(sigma * f));
    }
  }

  CsvTable map_table("yield_map", {"amplitude_au", "amplitude_over_sigma", "pump_photons", "harmonic_photons"});
  map_table.extras()["source"] = sh.yield_map;
  map_table.extras()["order"] = sh.harmonic;
  map_table.extras()["sigma_au"] = sigma;
  for (std::size_t i = 0; i < map_amplitudes.size(); ++i) {
    const double e = map_amplitudes[i];
    map_table.add_row({e, e / sigma, photons_per_amplitude2 * e * e, map_yields[i]});
  }
  map_table.write(ctx.out / "yield_map.csv", ctx.provenance);

  // Ensembles at every requested mean, pooled into one histogram.
  ShotEnsemble pooled;
  for (std::size_t s = 0; s < sh.mean_scales.size(); ++s) {
    const AmplitudeDistribution dist{sigma * std::sqrt(sh.mean_scales[s])};
    const std::uint64_t seed = c.seed + 0x9E3779B97F4A7C15ULL * s;
    const auto amplitudes = sample_amplitudes(dist, sh.count, seed);
    const DetectorNoise noise{sh.noise_model, sh.noise_sigma, seed ^ 0xD1B54A32D192ED03ULL};
    auto shots = synthesize_shots(amplitudes, map, photons_per_amplitude2, noise);
    pooled.amplitude.insert(pooled.amplitude.end(), shots.amplitude.begin(), shots.amplitude.end());
    pooled.pump_photons.insert(pooled.pump_photons.end(), shots.pump_photons.begin(), shots.pump_photons.end());
    pooled.harmonic_photons.insert(pooled.harmonic_photons.end(), shots.harmonic_photons.begin(),
                                   shots.harmonic_photons.end());
  }

  const double min_scale = *std::min_element(sh.mean_scales.begin(), sh.mean_scales.end());
  const double max_scale = *std::max_element(sh.mean_scales.begin(), sh.mean_scales.end());
  auto pump_axis = BinAxis::log_spaced(1e-3 * min_scale * mean_photons, 30.0 * max_scale * mean_photons, sh.pump_bins);
  auto amplitude_of = [&](double photons) { return std::sqrt(photons / photons_per_amplitude2); };
  double h_lo = map(amplitude_of(pump_axis.edges.front()));
  double h_hi = map(amplitude_of(pump_axis.edges.back()));
  if (!(h_lo > 0.0) || !(h_hi > h_lo)) {
    h_lo = INFINITY;
    h_hi = 0.0;
    for (double y : pooled.harmonic_photons) {
      if (y > 0.0) h_lo = std::min(h_lo, y), h_hi = std::max(h_hi, y);
    }
    if (!(h_hi > h_lo)) throw RangeError("harmonic photon numbers span no positive range");
  }
  const auto hist = bin_shots(pooled, pump_axis, BinAxis::log_spaced(h_lo, h_hi, sh.harmonic_bins));

  CsvTable joint("joint_histogram", {"x_edge", "y_edge", "count"});
  joint.extras()["x"] = "pump_photons";
  joint.extras()["y"] = "harmonic_photons";
  joint.extras()["x_edges"] = hist.pump.edges;
  joint.extras()["y_edges"] = hist.harmonic.edges;
  joint.extras()["total"] = hist.total;
  joint.extras()["mean_photon_number"] = mean_photons;
  joint.extras()["mean_scales"] = sh.mean_scales;
  for (std::size_t i = 0; i < hist.pump.bins(); ++i) {
    for (std::size_t j = 0; j < hist.harmonic.bins(); ++j) {
      joint.add_row({hist.pump.edges[i], hist.harmonic.edges[j], static_cast<double>(hist.at(i, j))});
    }
  }
  joint.write(ctx.out / "joint_histogram.csv", ctx.provenance);

  // Expected pump counts from the macroscopic BSV energy distribution; the
  // outer bins also collect clamped shots.
  CsvTable pump("pump_distribution", {"lower_edge", "upper_edge", "count", "expected"});
  const auto marginal = hist.pump_marginal();
  for (std::size_t i = 0; i < hist.pump.bins(); ++i) {
    double expected = 0.0;
    for (double scale : sh.mean_scales) {
      const auto state = SqueezedVacuumState::from_mean_photon_number(mean_photons * scale);
      const double lo = i == 0 ? 0.0 : macroscopic_energy_cdf(state, hist.pump.edges[i]);
      const double hi = i + 1 == hist.pump.bins() ? 1.0 : macroscopic_energy_cdf(state, hist.pump.edges[i + 1]);
      expected += static_cast<double>(sh.count) * (hi - lo);
    }
    pump.add_row({hist.pump.edges[i], hist.pump.edges[i + 1], static_cast<double>(marginal[i]), expected});
  }
  pump.write(ctx.out / "pump_distribution.csv", ctx.provenance);

  if (sh.write_shots) {
    CsvTable shots("shots", {"index", "amplitude_au", "pump_photons", "harmonic_photons"});
    for (std::size_t i = 0; i < pooled.amplitude.size(); ++i) {
      shots.add_row({static_cast<double>(i), pooled.amplitude[i], pooled.pump_photons[i], pooled.harmonic_photons[i]});
    }
    shots.write(ctx.out / "shots.csv", ctx.provenance);
  }

  const auto ridge = ridge_exponent(hist);
  write_json(ctx.out / "ridge.json",
             {{"subcommand", "sample-shots"},
              {"exponent", ridge.exponent},
              {"prefactor", ridge.prefactor},
              {"residual", ridge.residual},
              {"points", ridge.points},
              {"lower_pump_photons", ridge.lower},
              {"upper_pump_photons", ridge.upper},
              {"shots", pooled.amplitude.size()}},
             ctx.provenance, "ridge");
  log_of(ctx) << "sample-shots: " << pooled.amplitude.size() << " shots, ridge exponent "
              << format_number(ridge.exponent) << "\n";
}

void fit_scaling(const CommandContext& ctx) {
  const auto& c = ctx.config;
  std::vector<FitWindow> windows = c.scan.fit_windows;
  if (windows.empty()) {
    for (int q : c.scan.harmonics) {
      for (Driver d : {Driver::coherent, Driver::bsv}) {
        windows.push_back({q, d, 0.0, std::numeric_limits<double>::max()});
      }
    }
  }
  CsvTable table("fits", {"harmonic", "driver", "lower_tw_cm2", "upper_tw_cm2", "points", "exponent", "prefactor",
                          "residual"});
  table.extras()["driver_codes"] = {{"0", "coherent"}, {"1", "bsv"}};
  table.extras()["input"] = ctx.input.string();
  json fits = json::array();
  for (const auto& w : windows) {
    const auto data = read_csv(ctx.input / scaling_file(w.driver, w.harmonic));
    ScalingCurve curve;
    curve.abscissa = data.column("intensity_tw_cm2");
    curve.mean = data.column("yield_mean");
    curve.variance = data.column("yield_variance");
    curve.order = w.harmonic;
    curve.driver = w.driver;
    if (curve.abscissa.empty()) throw InsufficientData("scaling file for harmonic " + std::to_string(w.harmonic) + " is empty");
    const double lower = std::max(w.lower_tw_cm2, curve.abscissa.front());
    const double upper = std::min(w.upper_tw_cm2, curve.abscissa.back());
    const auto fit = fit_power_law(curve, lower, upper);
    table.add_row({static_cast<double>(w.harmonic), w.driver == Driver::coherent ? 0.0 : 1.0, fit.lower, fit.upper,
                   static_cast<double>(fit.points), fit.exponent, fit.prefactor, fit.residual});
    fits.push_back({{"harmonic", w.harmonic},
                    {"driver", std::string(to_string(w.driver))},
                    {"lower_tw_cm2", fit.lower},
                    {"upper_tw_cm2", fit.upper},
                    {"points", fit.points},
                    {"exponent", fit.exponent},
                    {"prefactor", fit.prefactor},
                    {"residual", fit.residual}});
  }
  table.write(ctx.out / "fits.csv", ctx.provenance);
  write_json(ctx.out / "fits.json", {{"subcommand", "fit-scaling"}, {"fits", fits}}, ctx.provenance, "fits");
  log_of(ctx) << "fit-scaling: " << fits.size() << " fits\n";
}

}  // namespace hhg::runner
