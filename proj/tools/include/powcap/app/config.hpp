#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "powcap/model.hpp"
#include "powcap/posyfit.hpp"

namespace powcap::app {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kSchema, kUnit };

  ConfigError(Kind kind, std::string path, const std::string& message);

  Kind kind() const { return kind_; }
  /// JSON path of the offending field, e.g. "gain[0][1]"; empty for syntax errors.
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

std::string_view to_string(ConfigError::Kind kind);

struct ScenarioOptions {
  std::optional<double> eps;
  std::optional<int> root_order;
  std::optional<ExponentMode> fit_mode;
  std::optional<bool> adaptive_root_order;

  friend bool operator==(const ScenarioOptions&, const ScenarioOptions&) = default;
};

/// Validated scenario. Powers and noise are held in mW regardless of the
/// units declared in the file.
struct ScenarioConfig {
  NetworkModel model;
  std::string description;
  ScenarioOptions options;
};

/// Throws ConfigError on malformed text, schema violations and bad units.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical form: mW units, every present field written.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace powcap::app
