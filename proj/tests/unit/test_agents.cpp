#include <doctest.h>

#include <cmath>
#include <vector>

#include "catdist/agents/agent_network.hpp"
#include "catdist/common/errors.hpp"

using namespace catdist;
using graph::Matrix;

namespace {

agents::AgentNetworkConfig small_config() {
  agents::AgentNetworkConfig c;
  c.input_dim = 5;
  c.n_actions = 3;
  c.hidden = {8};
  c.support = dist::SupportSpec(-2.0, 2.0, 5);
  return c;
}

std::vector<double> obs_for(std::size_t agent) {
  std::vector<double> obs(5, 0.0);
  obs[0] = 1.0;
  obs[3 + agent] = 1.0;
  return obs;
}

}  // namespace

TEST_CASE("zero parameters give uniform masses") {
  const agents::AgentNetwork net(small_config());
  graph::ParameterSet params;
  Rng rng(1);
  net.init_parameters(params, rng);
  for (const auto& [name, node] : params.entries()) node.get()->value.fill(0.0);
  const auto d = agents::agent_forward(net, obs_for(0), params);
  CHECK(d.n_actions() == 3);
  for (std::size_t a = 0; a < 3; ++a) {
    for (double p : d.probs(a)) CHECK(p == doctest::Approx(0.2));
    CHECK(d.expectation(a) == doctest::Approx(0.0));
  }
}

TEST_CASE("every action row is a distribution") {
  const agents::AgentNetwork net(small_config());
  graph::ParameterSet params;
  Rng rng(2);
  net.init_parameters(params, rng);
  Matrix obs(2, 5);
  for (std::size_t agent = 0; agent < 2; ++agent) {
    const auto o = obs_for(agent);
    for (std::size_t k = 0; k < 5; ++k) obs(agent, k) = o[k];
  }
  const auto sets = net.distributions(params, obs);
  REQUIRE(sets.size() == 2);
  for (const auto& set : sets) {
    for (std::size_t a = 0; a < 3; ++a) {
      double total = 0.0;
      for (double p : set.probs(a)) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // Parameters are shared, so only the id one-hot separates the agents.
  CHECK(sets[0].matrix() != sets[1].matrix());

  const std::vector<std::size_t> actions{2, 1};
  const auto picked = net.action_probs(params, graph::constant(obs), actions);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(picked.value()(0, k) == sets[0].probs(2)[k]);
    CHECK(picked.value()(1, k) == sets[1].probs(1)[k]);
  }
}

TEST_CASE("input width is checked") {
  const agents::AgentNetwork net(small_config());
  graph::ParameterSet params;
  Rng rng(3);
  net.init_parameters(params, rng);
  CHECK_THROWS_AS(net.distributions(params, Matrix(1, 4)), ShapeMismatch);
}

TEST_CASE("greedy selection uses expectations with low-index ties") {
  const dist::SupportSpec s(0.0, 2.0, 3);
  const agents::IndividualDistributionSet tie(Matrix(2, 3, {0, 1, 0, 0.5, 0, 0.5}), s);
  CHECK(agents::greedy_action(tie) == 0);
  const agents::IndividualDistributionSet ordered(
      Matrix(3, 3, {1, 0, 0, 0, 0, 1, 0, 1, 0}), s);
  CHECK(agents::greedy_action(ordered) == 1);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) CHECK(agents::epsilon_greedy(ordered, 0.0, rng) == 1);
}

TEST_CASE("epsilon one draws uniformly") {
  const dist::SupportSpec s(0.0, 2.0, 3);
  const agents::IndividualDistributionSet d(Matrix(3, 3, {1, 0, 0, 0, 0, 1, 0, 1, 0}), s);
  Rng rng(5);
  const int draws = 100000;
  std::vector<double> counts(3, 0.0);
  for (int i = 0; i < draws; ++i) counts[agents::epsilon_greedy(d, 1.0, rng)] += 1.0;
  double chi2 = 0.0;
  const double expected = draws / 3.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99.9% quantile of chi-square with 2 degrees of freedom.
  CHECK(chi2 < 13.82);
}
