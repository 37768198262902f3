#pragma once

// Built-in scenarios reproducing the reference figures.

#include "blochsim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace blochsim {

struct PresetInfo {
  std::string name;
  std::string summary;
};

std::vector<PresetInfo> list_presets();

/// Preset as a config document; ConfigError for unknown names.
nlohmann::json preset_json(std::string_view name);

ScenarioConfig preset(std::string_view name);

}  // namespace blochsim
