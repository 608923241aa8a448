#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "catdist/envs/matrix_game.hpp"
#include "catdist/trainer/config.hpp"

namespace catdist::cli {

// One experiment file: which algorithm, which game, how to train, where to write.
struct ExperimentConfig {
  train::Algorithm algorithm = train::Algorithm::dqmix;
  envs::MatrixGameSpec env = envs::default_matrix_game();
  std::optional<std::string> env_path;  // set when env came from a separate file
  train::TrainConfig train;
  std::string output_dir = "runs/catdist";
  std::uint64_t seed = 0;
};

// Keys follow configs/experiment.schema.json; anything else is rejected.
// Relative env paths are resolved against base_dir. Throws ConfigError.
ExperimentConfig experiment_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);

// Fully resolved form with the game inlined.
nlohmann::json to_json(const ExperimentConfig& config);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> algo;
  std::optional<std::size_t> atoms;
};

void apply(ExperimentConfig& config, const Overrides& overrides);

}  // namespace catdist::cli
