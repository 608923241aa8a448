#include "catdist/cli/experiment.hpp"

#include <fstream>

#include "catdist/common/errors.hpp"

namespace catdist::cli {

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig experiment_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "algorithm" && key != "env" && key != "train" && key != "output_dir" &&
        key != "seed") {
      throw ConfigError("unknown key '" + key + "' in experiment config");
    }
  }
  ExperimentConfig config;
  try {
    if (j.contains("algorithm")) {
      config.algorithm = train::algorithm_from_string(j["algorithm"].get<std::string>());
    }
    if (j.contains("env")) {
      const auto& env = j["env"];
      if (env.is_string()) {
        std::filesystem::path path = env.get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        config.env_path = path.string();
        config.env = envs::matrix_game_from_json(read_json(path));
      } else {
        config.env = envs::matrix_game_from_json(env);
      }
    }
    if (j.contains("train")) {
      if (j["train"].is_object() && j["train"].contains("seed")) {
        throw ConfigError("set the seed at the top level of the experiment config");
      }
      config.train = train::train_config_from_json(j["train"]);
    }
    config.output_dir = j.value("output_dir", config.output_dir);
    config.seed = j.value("seed", config.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  config.train.seed = config.seed;
  return config;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(read_json(path), path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig& config) {
  auto train_json = train::to_json(config.train);
  train_json.erase("seed");
  return {{"algorithm", train::to_string(config.algorithm)},
          {"env", envs::to_json(config.env)},
          {"train", train_json},
          {"output_dir", config.output_dir},
          {"seed", config.seed}};
}

void apply(ExperimentConfig& config, const Overrides& overrides) {
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.train.seed = *overrides.seed;
  }
  if (overrides.out) config.output_dir = *overrides.out;
  if (overrides.algo) config.algorithm = train::algorithm_from_string(*overrides.algo);
  if (overrides.atoms) {
    const auto& s = config.train.support;
    config.train.support = dist::SupportSpec(s.v_min(), s.v_max(), *overrides.atoms);
  }
}

}  // namespace catdist::cli
