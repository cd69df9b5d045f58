#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace powcap::app {

struct RunReport {
  std::string command;
  /// optimal, feasible, infeasible, valid, consistent, inconsistent,
  /// non_converged or error.
  std::string status;
  int exit_code = 0;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::string error_code;
  std::string error_message;
  std::string error_path;
  double elapsed_ms = 0.0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json to_json(const RunReport& report, bool include_timing = true);
RunReport report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with full double precision.
std::string serialize(const RunReport& report, bool include_timing = true);

}  // namespace powcap::app
