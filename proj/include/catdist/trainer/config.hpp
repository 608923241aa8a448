#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catdist/distcore/monotone_function.hpp"
#include "catdist/distcore/support.hpp"
#include "catdist/graph/optimizer.hpp"

namespace catdist::train {

enum class Algorithm { dvdn, dqmix };

std::string_view to_string(Algorithm algo);
Algorithm algorithm_from_string(std::string_view name);

// Linear anneal from start to finish over anneal_steps environment steps.
struct EpsilonSchedule {
  double start = 1.0;
  double finish = 1.0;
  std::size_t anneal_steps = 0;

  double at(std::size_t env_step) const;
};

struct TrainConfig {
  dist::SupportSpec support{-10.0, 20.0, 51};
  std::optional<double> gamma;  // falls back to the environment's gamma
  graph::AdamConfig adam;
  std::size_t batch_episodes = 32;
  std::size_t train_every = 8;    // episodes between gradient steps
  std::size_t target_sync = 200;  // gradient steps between target copies
  std::size_t buffer_episodes = 5000;
  std::size_t total_env_steps = 100000;
  std::size_t eval_every = 10000;  // env steps between metric rows
  EpsilonSchedule epsilon;
  double grad_clip = 10.0;  // 0 disables
  std::vector<std::size_t> agent_hidden{64, 64};
  std::size_t mixer_hidden = 4;
  dist::FunctionTag mixer_hidden_function = dist::FunctionTag::elu;
  dist::FunctionTag mixer_output_function = dist::FunctionTag::identity;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
// Unknown keys are rejected; missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace catdist::train
