#ifndef BSEL_CONFIG_HPP
#define BSEL_CONFIG_HPP

#include "bsel/mission.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace bsel {

/// One experiment: mission kind plus every tunable constant. All fields have
/// defaults, so "{}" is a valid convoy configuration.
struct ExperimentConfig {
  MissionKind mission = MissionKind::Convoy;
  int robots = 5;
  std::string output_dir = "runs/default";
  RunConfig run;
  LearningConfig learning;
  ParamSpace space;
  ConvoyEnv convoy;
  BoxEnv box;

  /// Range checks for every embedded type; throws std::invalid_argument
  /// naming the offending field.
  void validate() const;
  Mission to_mission() const;
};

/// Strict parse: unknown keys and wrongly typed values are rejected with the
/// dotted field path in the message.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace bsel

#endif  // BSEL_CONFIG_HPP
