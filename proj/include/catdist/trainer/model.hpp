#pragma once

#include <optional>
#include <span>
#include <vector>

#include "catdist/agents/agent_network.hpp"
#include "catdist/envs/matrix_game.hpp"
#include "catdist/mixers/mixers.hpp"
#include "catdist/trainer/config.hpp"

namespace catdist::train {

// Shared agent network plus the chosen global-distribution constructor.
class FactorizedModel {
 public:
  FactorizedModel(Algorithm algo, const envs::MatrixGameSpec& game, const TrainConfig& config);

  void init_parameters(graph::ParameterSet& params, Rng& rng) const;

  // observations[i] is B x obs_dim for agent i, actions[i] holds B action
  // indices, states is B x state_dim. Returns B x M global masses.
  graph::Node global_distribution(const graph::ParameterSet& params,
                                  std::span<const graph::Matrix> observations,
                                  std::span<const std::vector<std::size_t>> actions,
                                  const graph::Matrix& states,
                                  mixers::MixStats* stats = nullptr) const;

  const agents::AgentNetwork& agent() const { return agent_; }
  Algorithm algorithm() const { return algo_; }
  const dist::SupportSpec& support() const { return support_; }
  std::size_t n_agents() const { return n_agents_; }

 private:
  Algorithm algo_;
  dist::SupportSpec support_;
  std::size_t n_agents_;
  agents::AgentNetwork agent_;
  std::optional<mixers::DqmixMixer> mixer_;
};

}  // namespace catdist::train
