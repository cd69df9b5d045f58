#include "powcap/app/report.hpp"

namespace powcap::app {

using nlohmann::json;

json to_json(const RunReport& report, bool include_timing) {
  json out = {{"command", report.command},
              {"status", report.status},
              {"exit_code", report.exit_code},
              {"inputs", report.inputs},
              {"results", report.results}};
  if (!report.error_code.empty()) {
    out["error"] = {{"code", report.error_code}, {"message", report.error_message}};
    if (!report.error_path.empty()) out["error"]["path"] = report.error_path;
  }
  if (include_timing) out["timing"] = {{"elapsed_ms", report.elapsed_ms}};
  return out;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.exit_code = j.at("exit_code").get<int>();
  r.inputs = j.at("inputs");
  r.results = j.at("results");
  if (j.contains("error")) {
    const json& e = j.at("error");
    r.error_code = e.at("code").get<std::string>();
    r.error_message = e.at("message").get<std::string>();
    r.error_path = e.value("path", "");
  }
  if (j.contains("timing")) r.elapsed_ms = j.at("timing").at("elapsed_ms").get<double>();
  return r;
}

std::string serialize(const RunReport& report, bool include_timing) {
  return to_json(report, include_timing).dump(2) + "\n";
}

}  // namespace powcap::app
