#pragma once

#include <span>
#include <string>
#include <vector>

#include "catdist/common/rng.hpp"
#include "catdist/distcore/support.hpp"
#include "catdist/graph/matrix.hpp"
#include "catdist/graph/node.hpp"
#include "catdist/graph/parameter_set.hpp"

namespace catdist::agents {

// Per-action atom masses for one agent at one step; row a is action a.
class IndividualDistributionSet {
 public:
  IndividualDistributionSet(graph::Matrix probs, dist::SupportSpec support);

  std::size_t n_actions() const { return probs_.rows(); }
  std::span<const double> probs(std::size_t action) const { return probs_.row(action); }
  double expectation(std::size_t action) const;
  const dist::SupportSpec& support() const { return support_; }
  const graph::Matrix& matrix() const { return probs_; }

 private:
  graph::Matrix probs_;
  dist::SupportSpec support_;
};

struct AgentNetworkConfig {
  std::size_t input_dim = 0;
  std::size_t n_actions = 0;
  std::vector<std::size_t> hidden{64, 64};
  dist::SupportSpec support{-10.0, 20.0, 51};
};

// Feedforward relu network emitting an |A| x M logit block per observation,
// with a softmax over the atoms of each action. One parameter set serves
// every agent; agents are told apart by the id one-hot in their observation.
class AgentNetwork {
 public:
  explicit AgentNetwork(AgentNetworkConfig config, std::string prefix = "agent");

  void init_parameters(graph::ParameterSet& params, Rng& rng) const;

  // B x (|A| * M) logits.
  graph::Node logits(const graph::ParameterSet& params, const graph::Node& observations) const;

  // B x M masses of the indexed action in every row.
  graph::Node action_probs(const graph::ParameterSet& params, const graph::Node& observations,
                           std::span<const std::size_t> actions) const;

  // No-grad evaluation of every action for each observation row.
  std::vector<IndividualDistributionSet> distributions(const graph::ParameterSet& params,
                                                       const graph::Matrix& observations) const;

  const AgentNetworkConfig& config() const { return config_; }

 private:
  void check_shapes(const graph::ParameterSet& params, std::size_t obs_cols) const;

  AgentNetworkConfig config_;
  std::string prefix_;
};

IndividualDistributionSet agent_forward(const AgentNetwork& network,
                                        std::span<const double> observation,
                                        const graph::ParameterSet& params);

// argmax_a E[Z(a)], ties to the lowest index.
std::size_t greedy_action(const IndividualDistributionSet& dists);

// Uniform random action with probability epsilon, otherwise greedy.
std::size_t epsilon_greedy(const IndividualDistributionSet& dists, double epsilon, Rng& rng);

}  // namespace catdist::agents
