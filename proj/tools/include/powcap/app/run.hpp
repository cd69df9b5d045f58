#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powcap/app/config.hpp"
#include "powcap/app/report.hpp"
#include "powcap/posyfit.hpp"

namespace powcap::app {

enum class Command { kValidate, kMaxMin, kLatency, kFit, kFeasible, kOracle };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

/// Command-line overrides; unset fields fall back to the config's options.
struct RunFlags {
  std::optional<double> eps;
  std::optional<int> root_order;
  std::optional<ExponentMode> fit_mode;
  bool adaptive_root_order = false;
  /// feasible: common threshold on w_i log2(1 + SINR_i), bits.
  std::optional<double> t_bits;
  /// feasible: per-link rate floors, bits.
  std::optional<std::vector<double>> rates_bits;
  /// oracle: seed for the random two-link instance used without a config.
  std::uint64_t seed = 1;
  /// oracle: grid points per axis; 0 picks a size from the link count.
  int grid_points = 0;
};

struct RunOutput {
  RunReport report;
  /// Human-readable table, 4 decimals.
  std::string text;
  /// fit: relative error profile for CSV export.
  std::vector<ErrorSample> profile;
};

RunOutput run(Command command, const std::optional<ScenarioConfig>& config, const RunFlags& flags);

/// Loads the config (when given) and runs; config errors become error reports.
RunOutput run_file(Command command, const std::optional<std::filesystem::path>& config_path,
                   const RunFlags& flags);

/// "x,rel_error_pct" header plus one row per sample, full precision.
std::string profile_csv(const std::vector<ErrorSample>& profile);

}  // namespace powcap::app
