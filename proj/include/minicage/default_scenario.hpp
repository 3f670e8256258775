#pragma once

#include "minicage/default_scenario_data.hpp"
#include "minicage/scenario_io.hpp"

namespace minicage {

/// The embedded 13-host network (data/default.scenario).
inline const ScenarioConfig& default_scenario_ref() {
  static const ScenarioConfig config = load_scenario(kDefaultScenarioText);
  return config;
}

inline ScenarioConfig default_scenario() { return default_scenario_ref(); }

}  // namespace minicage
