#include "catdist/agents/agent_network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catdist/common/errors.hpp"
#include "catdist/graph/layers.hpp"
#include "catdist/graph/ops.hpp"

namespace catdist::agents {

IndividualDistributionSet::IndividualDistributionSet(graph::Matrix probs,
                                                     dist::SupportSpec support)
    : probs_(std::move(probs)), support_(support) {
  if (probs_.cols() != support_.m()) {
    throw ShapeMismatch("distribution set width does not match the support");
  }
}

double IndividualDistributionSet::expectation(std::size_t action) const {
  const auto p = probs_.row(action);
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) total += p[j] * support_.atom(j);
  return total;
}

AgentNetwork::AgentNetwork(AgentNetworkConfig config, std::string prefix)
    : config_(std::move(config)), prefix_(std::move(prefix)) {
  if (config_.input_dim == 0 || config_.n_actions == 0) {
    throw ConfigError("agent network needs positive input and action counts");
  }
}

void AgentNetwork::init_parameters(graph::ParameterSet& params, Rng& rng) const {
  std::size_t width = config_.input_dim;
  for (std::size_t k = 0; k < config_.hidden.size(); ++k) {
    graph::add_dense_parameters(params, prefix_ + ".fc" + std::to_string(k), width,
                                config_.hidden[k], rng);
    width = config_.hidden[k];
  }
  graph::add_dense_parameters(params, prefix_ + ".out", width,
                              config_.n_actions * config_.support.m(), rng);
}

void AgentNetwork::check_shapes(const graph::ParameterSet& params, std::size_t obs_cols) const {
  if (obs_cols != config_.input_dim) {
    throw ShapeMismatch("observation has " + std::to_string(obs_cols) + " features, expected " +
                        std::to_string(config_.input_dim));
  }
  const auto& out_w = params.at(prefix_ + ".out.w");
  if (out_w.cols() != config_.n_actions * config_.support.m()) {
    throw ShapeMismatch("agent output layer is not shaped for |A| * M logits");
  }
}

graph::Node AgentNetwork::logits(const graph::ParameterSet& params,
                                 const graph::Node& observations) const {
  check_shapes(params, observations.cols());
  graph::Node h = observations;
  for (std::size_t k = 0; k < config_.hidden.size(); ++k) {
    h = graph::activation(graph::apply_dense(params, prefix_ + ".fc" + std::to_string(k), h),
                          graph::Activation::relu);
  }
  return graph::apply_dense(params, prefix_ + ".out", h);
}

graph::Node AgentNetwork::action_probs(const graph::ParameterSet& params,
                                       const graph::Node& observations,
                                       std::span<const std::size_t> actions) const {
  for (std::size_t a : actions) {
    if (a >= config_.n_actions) throw ShapeMismatch("action index out of range");
  }
  const auto block = graph::select_blocks(logits(params, observations), actions,
                                          config_.support.m());
  return graph::activation(block, graph::Activation::softmax);
}

std::vector<IndividualDistributionSet> AgentNetwork::distributions(
    const graph::ParameterSet& params, const graph::Matrix& observations) const {
  const auto out = logits(params, graph::constant(observations));
  const std::size_t m = config_.support.m();
  std::vector<IndividualDistributionSet> sets;
  sets.reserve(observations.rows());
  for (std::size_t r = 0; r < observations.rows(); ++r) {
    const auto row = out.value().row(r);
    graph::Matrix probs(config_.n_actions, m);
    for (std::size_t a = 0; a < config_.n_actions; ++a) {
      const auto logit = row.subspan(a * m, m);
      const double peak = *std::max_element(logit.begin(), logit.end());
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        probs(a, j) = std::exp(logit[j] - peak);
        total += probs(a, j);
      }
      for (std::size_t j = 0; j < m; ++j) probs(a, j) /= total;
    }
    sets.emplace_back(std::move(probs), config_.support);
  }
  return sets;
}

IndividualDistributionSet agent_forward(const AgentNetwork& network,
                                        std::span<const double> observation,
                                        const graph::ParameterSet& params) {
  auto sets = network.distributions(params, graph::Matrix::row_vector(observation));
  return std::move(sets.front());
}

std::size_t greedy_action(const IndividualDistributionSet& dists) {
  std::size_t best = 0;
  double best_value = dists.expectation(0);
  for (std::size_t a = 1; a < dists.n_actions(); ++a) {
    const double value = dists.expectation(a);
    if (value > best_value) {
      best = a;
      best_value = value;
    }
  }
  return best;
}

std::size_t epsilon_greedy(const IndividualDistributionSet& dists, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_index(dists.n_actions());
  return greedy_action(dists);
}

}  // namespace catdist::agents
