#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "artifacts.hpp"
#include "config.hpp"

namespace hhg::runner {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_instability = 3;
inline constexpr int exit_range = 4;
inline constexpr int exit_io = 5;

struct CommandContext {
  RunConfig config;
  std::filesystem::path out;
  std::filesystem::path input;  ///< fit-scaling source directory
  Provenance provenance;
  std::ostream* log = nullptr;
};

void simulate_coherent(const CommandContext& ctx);
void simulate_bsv(const CommandContext& ctx);
void scan_power(const CommandContext& ctx);
void sample_shots(const CommandContext& ctx);
void fit_scaling(const CommandContext& ctx);

/// Runs the built-in analytic checks, one PASS/FAIL line each. True if all pass.
bool selftest(std::ostream& out);

/// Full command line (without the program name). Prints errors to `err` and
/// returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Exit status for the exception currently being handled; writes the message.
int report_current_exception(std::ostream& err);

std::string_view version();

}  // namespace hhg::runner
