#include <algorithm>
#include <cmath>

#include "catdist/checks/suites.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/graph/matrix.hpp"
#include "catdist/mixers/mixers.hpp"
#include "random_inputs.hpp"

namespace catdist::checks {

using detail::argmax;
using detail::random_probs;
using detail::Tally;
using graph::Matrix;

namespace {

constexpr std::size_t kTrials = 100;
constexpr std::size_t kMaxAttempts = 200;

struct Scenario {
  std::size_t n_agents = 2;
  std::size_t n_actions = 2;
  // probs[i][a] is agent i's mass vector for action a.
  std::vector<std::vector<std::vector<double>>> probs;
  Matrix state;
};

// Masses confined to atoms [lo, lo + width) so shifted copies stay on the grid.
std::vector<double> windowed_probs(std::size_t m, std::size_t lo, std::size_t width, Rng& rng) {
  std::vector<double> p(m, 0.0);
  const auto inner = random_probs(width, rng);
  std::copy(inner.begin(), inner.end(), p.begin() + static_cast<std::ptrdiff_t>(lo));
  return p;
}

Scenario random_scenario(const mixers::DqmixConfig& config, std::size_t n_actions, Rng& rng) {
  Scenario s;
  s.n_agents = config.n_agents;
  s.n_actions = n_actions;
  const std::size_t m = config.support.m();
  // Atoms roughly in [-3, 3] on the default grid.
  const std::size_t lo = m * 12 / 51;
  const std::size_t width = std::max<std::size_t>(2, m * 10 / 51);
  for (std::size_t i = 0; i < s.n_agents; ++i) {
    s.probs.emplace_back();
    for (std::size_t a = 0; a < n_actions; ++a) {
      s.probs[i].push_back(windowed_probs(m, lo, width, rng));
    }
  }
  s.state = Matrix(1, config.state_dim);
  for (auto& v : s.state.data()) v = rng.uniform(-1.0, 1.0);
  return s;
}

std::size_t joint_count(const Scenario& s) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < s.n_agents; ++i) n *= s.n_actions;
  return n;
}

// Expected global return of every joint action (row-major), plus clipping.
std::vector<double> joint_expectations(const mixers::DqmixMixer& mixer,
                                       const graph::ParameterSet& params, const Scenario& s,
                                       mixers::MixStats& stats) {
  const std::size_t joints = joint_count(s);
  const auto& support = mixer.config().support;
  std::vector<graph::Node> inputs;
  std::vector<Matrix> rows(s.n_agents, Matrix(joints, support.m()));
  for (std::size_t k = 0; k < joints; ++k) {
    std::size_t rest = k;
    for (std::size_t i = s.n_agents; i-- > 0;) {
      const auto& p = s.probs[i][rest % s.n_actions];
      std::copy(p.begin(), p.end(), rows[i].row(k).begin());
      rest /= s.n_actions;
    }
  }
  for (auto& r : rows) inputs.push_back(graph::constant(std::move(r)));
  Matrix states(joints, s.state.cols());
  for (std::size_t k = 0; k < joints; ++k) {
    std::copy(s.state.data().begin(), s.state.data().end(), states.row(k).begin());
  }
  graph::NoGradGuard no_grad;
  const auto out = mixer.mix(inputs, graph::constant(std::move(states)), params, &stats);
  std::vector<double> values;
  for (std::size_t k = 0; k < joints; ++k) {
    const auto row = out.value().row(k);
    values.push_back(dist::expectation(
        dist::CategoricalDistribution(support, std::vector<double>(row.begin(), row.end()))));
  }
  return values;
}

std::size_t individual_argmax(const Scenario& s, std::size_t agent,
                              const dist::SupportSpec& support) {
  std::vector<double> values;
  for (const auto& p : s.probs[agent]) {
    values.push_back(dist::expectation(dist::CategoricalDistribution(support, p)));
  }
  return argmax(values);
}

}  // namespace

SuiteReport run_digm_suite(const CheckOptions& options) {
  Rng rng(options.seed);
  SuiteReport report{"digm", {}};

  Tally digm("dqmix_greedy_consistency");
  Tally monotone("dqmix_monotone_in_inputs");
  std::size_t rejected = 0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    mixers::DqmixConfig config;
    config.n_agents = 2 + rng.uniform_index(2);
    const std::size_t n_actions = 2 + rng.uniform_index(2);
    const mixers::DqmixMixer mixer(config);

    // Resample until no projection inside the mixer clips any mass.
    graph::ParameterSet params;
    Scenario scenario;
    std::vector<double> values;
    bool found = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
      params = graph::ParameterSet();
      mixer.init_parameters(params, rng);
      scenario = random_scenario(config, n_actions, rng);
      mixers::MixStats stats;
      values = joint_expectations(mixer, params, scenario, stats);
      found = stats.clipped == 0.0;
      if (!found) ++rejected;
    }
    if (!found) {
      digm.trial(false, "no clip-free parameterization found");
      continue;
    }

    std::size_t expected = 0;
    for (std::size_t i = 0; i < scenario.n_agents; ++i) {
      expected = expected * n_actions + individual_argmax(scenario, i, config.support);
    }
    const std::size_t joint = argmax(values);
    digm.trial(joint == expected, "trial " + std::to_string(t) + ": joint argmax " +
                                      std::to_string(joint) + " vs individual " +
                                      std::to_string(expected));

    // Shift one agent's first action right by a few atoms: a first-order
    // stochastic improvement must not lower any joint expectation using it.
    Scenario shifted = scenario;
    const std::size_t agent = rng.uniform_index(scenario.n_agents);
    auto& p = shifted.probs[agent][0];
    const std::size_t by = 1 + rng.uniform_index(3);
    std::rotate(p.rbegin(), p.rbegin() + static_cast<std::ptrdiff_t>(by), p.rend());
    mixers::MixStats ignored;
    const auto after = joint_expectations(mixer, params, shifted, ignored);
    bool ok = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (after[k] < values[k] - 1e-12) ok = false;
    }
    monotone.trial(ok, "trial " + std::to_string(t));
  }
  digm.note(std::to_string(rejected) + " clipped parameterizations resampled");
  report.checks.push_back(digm.result());
  report.checks.push_back(monotone.result());

  {
    Tally tally("dvdn_expectation_additive");
    const dist::SupportSpec support(-10.0, 20.0, 51);
    for (std::size_t t = 0; t < kTrials; ++t) {
      const std::size_t n = 2 + rng.uniform_index(2);
      std::vector<graph::Node> inputs;
      double expected = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        auto p = windowed_probs(support.m(), 12, 10, rng);
        expected += dist::expectation(dist::CategoricalDistribution(support, p));
        inputs.push_back(graph::constant(Matrix::row_vector(p)));
      }
      const auto out = mixers::dvdn_mix(inputs, support);
      const auto row = out.value().row(0);
      const double got = dist::expectation(
          dist::CategoricalDistribution(support, std::vector<double>(row.begin(), row.end())));
      tally.trial(std::abs(got - expected) <= 1e-6);
    }
    report.checks.push_back(tally.result());
  }
  return report;
}

}  // namespace catdist::checks
