#include "catdist/trainer/model.hpp"

#include "catdist/common/errors.hpp"
#include "catdist/graph/ops.hpp"

namespace catdist::train {

namespace {

agents::AgentNetworkConfig agent_config(const envs::MatrixGameSpec& game,
                                        const TrainConfig& config) {
  agents::AgentNetworkConfig c;
  c.input_dim = game.observation_dim();
  c.n_actions = game.actions;
  c.hidden = config.agent_hidden;
  c.support = config.support;
  return c;
}

}  // namespace

FactorizedModel::FactorizedModel(Algorithm algo, const envs::MatrixGameSpec& game,
                                 const TrainConfig& config)
    : algo_(algo),
      support_(config.support),
      n_agents_(game.agents),
      agent_(agent_config(game, config)) {
  if (algo_ == Algorithm::dqmix) {
    mixers::DqmixConfig mc;
    mc.n_agents = game.agents;
    mc.state_dim = game.state_dim();
    mc.hidden = config.mixer_hidden;
    mc.support = config.support;
    mc.hidden_function = config.mixer_hidden_function;
    mc.output_function = config.mixer_output_function;
    mixer_.emplace(mc);
  }
}

void FactorizedModel::init_parameters(graph::ParameterSet& params, Rng& rng) const {
  agent_.init_parameters(params, rng);
  if (mixer_) mixer_->init_parameters(params, rng);
}

graph::Node FactorizedModel::global_distribution(
    const graph::ParameterSet& params, std::span<const graph::Matrix> observations,
    std::span<const std::vector<std::size_t>> actions, const graph::Matrix& states,
    mixers::MixStats* stats) const {
  if (observations.size() != n_agents_ || actions.size() != n_agents_) {
    throw ShapeMismatch("expected observations and actions for every agent");
  }
  const std::size_t batch = states.rows();
  // All agents go through the shared network in one stacked pass.
  std::vector<graph::Node> obs_nodes;
  std::vector<std::size_t> stacked_actions;
  for (std::size_t i = 0; i < n_agents_; ++i) {
    if (observations[i].rows() != batch || actions[i].size() != batch) {
      throw ShapeMismatch("agent inputs disagree on the batch size");
    }
    obs_nodes.push_back(graph::constant(observations[i]));
    stacked_actions.insert(stacked_actions.end(), actions[i].begin(), actions[i].end());
  }
  const auto probs = agent_.action_probs(params, graph::concat_rows(obs_nodes), stacked_actions);
  std::vector<graph::Node> individuals;
  for (std::size_t i = 0; i < n_agents_; ++i) {
    individuals.push_back(graph::slice_rows(probs, i * batch, batch));
  }
  if (!mixer_) return mixers::dvdn_mix(individuals, support_, stats);
  return mixer_->mix(individuals, graph::constant(states), params, stats);
}

}  // namespace catdist::train
