#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"
#include "hhg/errors.hpp"

#ifndef HHG_VERSION
#define HHG_VERSION "0.0.0"
#endif

namespace hhg::runner {

std::string_view version() { return HHG_VERSION; }

int report_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const SolverInstability& e) {
    err << "solver instability: " << e.what() << "\n";
    return exit_instability;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << "\n";
    return exit_range;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  } catch (...) {
    err << "error: unknown failure\n";
    return exit_failure;
  }
}

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string input;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> overrides;
};

std::filesystem::path resolve_output(const Options& o, const nlohmann::json& doc, const std::string& subcommand) {
  if (!o.out.empty()) return o.out;
  if (doc.contains("output") && doc["output"].is_object() && doc["output"].contains("directory") &&
      doc["output"]["directory"].is_string() && !doc["output"]["directory"].get<std::string>().empty()) {
    return doc["output"]["directory"].get<std::string>();
  }
  if (const char* root = std::getenv("HHG_OUTPUT_ROOT"); root && *root) {
    return std::filesystem::path(root) / subcommand;
  }
  return std::filesystem::path("hhg-output") / subcommand;
}

int execute(const std::string& subcommand, const Options& o, std::ostream& out) {
  nlohmann::json doc = o.config.empty() ? nlohmann::json::object() : load_config_file(o.config);
  if (!doc.is_object()) throw ConfigError("config root must be an object", "");
  // Overrides refine the default preset rather than replacing it.
  if (!doc.contains("material")) doc["material"] = {{"preset", "ln-like"}};
  for (const auto& assignment : o.overrides) apply_override(doc, assignment);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.workers) doc["workers"] = *o.workers;

  CommandContext ctx;
  ctx.out = resolve_output(o, doc, subcommand);
  if (!doc.contains("output")) doc["output"] = nlohmann::json::object();
  if (doc["output"].is_object()) doc["output"]["directory"] = ctx.out.string();
  ctx.config = parse_config(doc);
  ctx.input = o.input.empty() ? ctx.out : std::filesystem::path(o.input);
  ctx.provenance = {std::string(version()), config_hash(ctx.config), ctx.config.seed, utc_timestamp()};
  ctx.log = &out;

  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec || !std::filesystem::is_directory(ctx.out)) {
    throw IoError("cannot create output directory '" + ctx.out.string() + "'");
  }
  write_text(ctx.out / "effective_config.json", ctx.config.effective.dump(2) + "\n");

  if (subcommand == "simulate-coherent") simulate_coherent(ctx);
  else if (subcommand == "simulate-bsv") simulate_bsv(ctx);
  else if (subcommand == "scan-power") scan_power(ctx);
  else if (subcommand == "sample-shots") sample_shots(ctx);
  else if (subcommand == "fit-scaling") fit_scaling(ctx);
  out << "wrote " << ctx.out.string() << " (config " << ctx.provenance.config_hash << ")\n";
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-harmonic generation in solids driven by coherent light and bright squeezed vacuum"};
  app.name("hhgsim");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate-coherent", "one SBE run: spectrum, yields, field and currents"},
      {"simulate-bsv", "Husimi-Q averaged BSV spectrum and enhancement over coherent drive"},
      {"scan-power", "coherent and BSV yields over an intensity grid"},
      {"sample-shots", "seeded shot ensemble and joint photon-number histogram"},
      {"fit-scaling", "power-law fits of scan-power output"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out,-o", o.out, "output directory (default: output.directory, then $HHG_OUTPUT_ROOT)");
    sub->add_option("--seed", o.seed, "overrides the config seed");
    sub->add_option("--workers,-j", o.workers, "worker threads (0: available parallelism)")->check(CLI::NonNegativeNumber);
    sub->add_option("--set", o.overrides, "override a config value, key.path=value");
    if (name == "fit-scaling") sub->add_option("--input,-i", o.input, "directory holding scaling_*.csv (default: --out)");
  }
  app.add_subcommand("selftest", "run the built-in analytic checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string subcommand = chosen->get_name();
  if (subcommand == "selftest") return selftest(out) ? exit_ok : exit_failure;
  try {
    return execute(subcommand, o, out);
  } catch (...) {
    return report_current_exception(err);
  }
}

}  // namespace hhg::runner
