#include "powcap/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "powcap/error.hpp"

namespace powcap::app {

using nlohmann::json;

ConfigError::ConfigError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message),
      kind_(kind),
      path_(std::move(path)) {}

std::string_view to_string(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::kSyntax: return "syntax_error";
    case ConfigError::Kind::kSchema: return "schema_error";
    case ConfigError::Kind::kUnit: return "unit_error";
  }
  return "unknown";
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& message) {
  throw ConfigError(ConfigError::Kind::kSchema, path, message);
}

std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(path, "must be finite");
  return v;
}

enum class Sign { kNonnegative, kPositive };

double checked(const json& j, const std::string& path, Sign sign) {
  const double v = number(j, path);
  if (sign == Sign::kPositive && !(v > 0.0)) schema(path, "must be > 0");
  if (sign == Sign::kNonnegative && !(v >= 0.0)) schema(path, "must be >= 0");
  return v;
}

Vector vector_field(const json& root, const std::string& key, Eigen::Index size, Sign sign) {
  const json& j = root.at(key);
  if (!j.is_array()) schema(key, "expected an array");
  if (static_cast<Eigen::Index>(j.size()) != size) {
    schema(key, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(size);
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = checked(j[i], at(key, i), sign);
  return v;
}

Matrix gain_field(const json& root) {
  const json& j = root.at("gain");
  if (!j.is_array() || j.empty()) schema("gain", "expected a non-empty square array of rows");
  const size_t m = j.size();
  Matrix g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (size_t r = 0; r < m; ++r) {
    const std::string row_path = at("gain", r);
    if (!j[r].is_array() || j[r].size() != m) {
      schema(row_path, "expected a row of " + std::to_string(m) + " entries");
    }
    for (size_t c = 0; c < m; ++c) {
      g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          checked(j[r][c], at(row_path, c), r == c ? Sign::kPositive : Sign::kNonnegative);
    }
  }
  return g;
}

std::string unit_field(const json& root, const std::string& key, const std::set<std::string>& allowed) {
  if (!root.contains(key)) return "mW";
  const json& j = root.at(key);
  if (!j.is_string()) schema(key, "expected a string");
  const std::string unit = j.get<std::string>();
  if (!allowed.contains(unit)) {
    throw ConfigError(ConfigError::Kind::kUnit, key, "unsupported unit '" + unit + "'");
  }
  return unit;
}

ScenarioOptions options_field(const json& root) {
  ScenarioOptions out;
  if (!root.contains("options")) return out;
  const json& j = root.at("options");
  if (!j.is_object()) schema("options", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "options." + key;
    if (key == "eps") {
      out.eps = checked(value, path, Sign::kPositive);
    } else if (key == "T") {
      if (!value.is_number_integer() || value.get<long>() < 1 || value.get<long>() > 1000) {
        schema(path, "expected an integer in [1, 1000]");
      }
      out.root_order = value.get<int>();
    } else if (key == "fit_mode") {
      if (!value.is_string()) schema(path, "expected \"puiseux\" or \"full\"");
      try {
        out.fit_mode = parse_exponent_mode(value.get<std::string>());
      } catch (const Error&) {
        schema(path, "expected \"puiseux\" or \"full\"");
      }
    } else if (key == "adaptive_T") {
      if (!value.is_boolean()) schema(path, "expected a boolean");
      out.adaptive_root_order = value.get<bool>();
    } else {
      schema(path, "unknown field");
    }
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::kSyntax, "", e.what());
  }
  if (!root.is_object()) schema("", "top level must be an object");

  static const std::set<std::string> known = {"gain",      "p_max",      "noise",
                                              "noise_unit", "power_unit", "weights",
                                              "min_rates", "options",    "description"};
  for (const auto& [key, value] : root.items()) {
    if (!known.contains(key)) schema(key, "unknown field");
  }
  for (const char* key : {"gain", "p_max", "noise", "weights"}) {
    if (!root.contains(key)) schema(key, "missing required field");
  }

  ScenarioConfig config;
  unit_field(root, "power_unit", {"mW"});
  const std::string noise_unit = unit_field(root, "noise_unit", {"mW", "uW"});

  NetworkModel& m = config.model;
  m.gain = gain_field(root);
  const Eigen::Index size = m.gain.rows();
  m.p_max = vector_field(root, "p_max", size, Sign::kPositive);
  m.noise = vector_field(root, "noise", size, Sign::kPositive);
  if (noise_unit == "uW") m.noise /= 1000.0;
  m.weights = vector_field(root, "weights", size, Sign::kPositive);
  if (root.contains("min_rates")) m.min_rates = vector_field(root, "min_rates", size, Sign::kNonnegative);
  if (root.contains("description")) {
    if (!root["description"].is_string()) schema("description", "expected a string");
    config.description = root["description"].get<std::string>();
  }
  config.options = options_field(root);
  validate(m);
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

namespace {

json to_array(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

json to_json(const ScenarioConfig& config) {
  const NetworkModel& m = config.model;
  json gain = json::array();
  for (Eigen::Index r = 0; r < m.size(); ++r) gain.push_back(to_array(m.gain.row(r).transpose()));
  json out = {{"gain", gain},
              {"p_max", to_array(m.p_max)},
              {"power_unit", "mW"},
              {"noise", to_array(m.noise)},
              {"noise_unit", "mW"},
              {"weights", to_array(m.weights)}};
  if (m.min_rates) out["min_rates"] = to_array(*m.min_rates);
  if (!config.description.empty()) out["description"] = config.description;
  json options = json::object();
  if (config.options.eps) options["eps"] = *config.options.eps;
  if (config.options.root_order) options["T"] = *config.options.root_order;
  if (config.options.fit_mode) options["fit_mode"] = std::string(to_string(*config.options.fit_mode));
  if (config.options.adaptive_root_order) options["adaptive_T"] = *config.options.adaptive_root_order;
  if (!options.empty()) out["options"] = options;
  return out;
}

}  // namespace powcap::app
