#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "agsynth/experiment.hpp"

namespace agsynth {

struct SurveyConfig {
  std::filesystem::path pool = "survey/pool.json";
  std::filesystem::path store_dir = "survey";
  std::filesystem::path static_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = 42;

  friend bool operator==(const SurveyConfig&, const SurveyConfig&) = default;
};

/// Everything a config file describes. Sections: "experiment" (required),
/// "backend", "fsim", "survey". See README for the schema.
struct AppConfig {
  ExperimentConfig experiment;
  SurveyConfig survey;
};

/// Strict parse: unknown keys are rejected with their dotted name.
/// Relative paths resolve against `base_dir`. A category without a prompt
/// gets default_prompt(name). Throws InvalidConfig.
AppConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads and parses a config file; relative paths resolve against its
/// directory. Throws IoError (naming the path) or InvalidConfig.
AppConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const AppConfig& cfg);

/// Starter config for the six-crop study layout used by `agsynth init`.
nlohmann::json example_config();

}  // namespace agsynth
