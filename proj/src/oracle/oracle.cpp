#include "catdist/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "catdist/common/errors.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/distcore/serialization.hpp"
#include "catdist/graph/ops.hpp"
#include "catdist/mixers/mixers.hpp"

namespace catdist::oracle {

namespace {

double component_cdf(const envs::GaussianComponent& c, double x) {
  if (c.variance == 0.0) return x >= c.mean ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - c.mean) / std::sqrt(2.0 * c.variance));
}

double mixture_cdf(const envs::RewardSpec& spec, double x) {
  double total = 0.0;
  for (const auto& c : spec.components()) total += c.weight * component_cdf(c, x);
  return total;
}

// Literal hat-function split of one scalar onto the grid:
// coefficient_k = [1 - |clip(y) - z_k| / delta] bounded to [0, 1].
void hat_split(double y, double mass, const dist::SupportSpec& support, std::vector<double>& out) {
  const double clipped = std::clamp(y, support.v_min(), support.v_max());
  const double step = support.delta();
  const auto centre = static_cast<long>(std::floor((clipped - support.v_min()) / step));
  for (long k = centre - 1; k <= centre + 1; ++k) {
    if (k < 0 || k >= static_cast<long>(support.m())) continue;
    const double coefficient =
        std::clamp(1.0 - std::abs(clipped - support.atom(static_cast<std::size_t>(k))) / step, 0.0, 1.0);
    out[static_cast<std::size_t>(k)] += coefficient * mass;
  }
}

struct Outcome {
  double value;
  double mass;
};

double apply_tag(dist::FunctionTag tag, double x) {
  switch (tag) {
    case dist::FunctionTag::relu:
      return x > 0.0 ? x : 0.0;
    case dist::FunctionTag::elu:
      return x > 0.0 ? x : std::exp(x) - 1.0;
    case dist::FunctionTag::identity:
      break;
  }
  return x;
}

// Grid outcomes of projecting w * X for one input mass vector.
std::vector<Outcome> weighted_outcomes(const std::vector<double>& probs, double w,
                                       const dist::SupportSpec& support) {
  std::vector<double> split(support.m(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) hat_split(w * support.atom(k), probs[k], support, split);
  }
  std::vector<Outcome> out;
  for (std::size_t k = 0; k < split.size(); ++k) {
    if (split[k] > 0.0) out.push_back({support.atom(k), split[k]});
  }
  return out;
}

std::vector<std::vector<double>> brute_force_layer(const std::vector<std::vector<double>>& inputs,
                                                   const ScalarLayer& layer,
                                                   const dist::SupportSpec& support) {
  const std::size_t n_in = inputs.size();
  if (layer.weights.size() != n_in) throw ShapeMismatch("brute_force_mix: weight rows != inputs");
  std::vector<std::vector<double>> outputs;
  for (std::size_t j = 0; j < layer.biases.size(); ++j) {
    std::vector<std::vector<Outcome>> per_input;
    for (std::size_t i = 0; i < n_in; ++i) {
      per_input.push_back(weighted_outcomes(inputs[i], layer.weights[i].at(j), support));
    }
    std::vector<double> out(support.m(), 0.0);
    // Odometer over the product of per-input outcome lists.
    std::vector<std::size_t> cursor(n_in, 0);
    while (true) {
      double value = layer.biases[j];
      double mass = 1.0;
      for (std::size_t i = 0; i < n_in; ++i) {
        value += per_input[i][cursor[i]].value;
        mass *= per_input[i][cursor[i]].mass;
      }
      hat_split(apply_tag(layer.function, value), mass, support, out);
      std::size_t i = 0;
      while (i < n_in && ++cursor[i] == per_input[i].size()) cursor[i++] = 0;
      if (i == n_in) break;
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

}  // namespace

std::vector<double> discretize_reward(const envs::RewardSpec& spec,
                                      const dist::SupportSpec& support) {
  const std::size_t m = support.m();
  const double half = 0.5 * support.delta();
  std::vector<double> probs(m, 0.0);
  double previous = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double cdf = mixture_cdf(spec, support.atom(j) + half);
    probs[j] = std::max(0.0, cdf - previous);
    previous = std::max(previous, cdf);
  }
  probs[m - 1] = std::max(0.0, 1.0 - previous);
  return probs;
}

std::vector<envs::JointAction> greedy_continuation(const envs::MatrixGameSpec& game) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < game.payoff.size(); ++k) {
    if (game.payoff[k].mean() > game.payoff[best].mean()) best = k;
  }
  return std::vector<envs::JointAction>(game.horizon > 0 ? game.horizon - 1 : 0,
                                        game.joint_from_index(best));
}

DiscretizedTruth true_return_distribution(const envs::MatrixGameSpec& game,
                                          const std::vector<envs::JointAction>& continuation,
                                          const dist::SupportSpec& support) {
  game.validate();
  if (continuation.size() + 1 != game.horizon) {
    throw ConfigError("continuation must name one joint action per step after the first");
  }
  DiscretizedTruth truth{support, {}};
  for (std::size_t k = 0; k < game.joint_action_count(); ++k) {
    JointActionTruth row;
    row.joint = game.joint_from_index(k);
    const auto& first = game.payoff[k];
    auto acc = dist::CategoricalDistribution(support, discretize_reward(first, support));
    row.mean = first.mean();
    row.variance = first.variance();
    double discount = 1.0;
    for (const auto& joint : continuation) {
      discount *= game.gamma;
      const auto& spec = game.entry(joint);
      const auto step = dist::project(
          dist::weighting(dist::CategoricalDistribution(support, discretize_reward(spec, support)),
                          discount),
          support);
      acc = dist::project(dist::convolve(acc, step), support);
      row.mean += discount * spec.mean();
      row.variance += discount * discount * spec.variance();
    }
    row.probs.assign(acc.probs().begin(), acc.probs().end());
    truth.entries.push_back(std::move(row));
  }
  return truth;
}

std::vector<std::vector<double>> brute_force_mix(const std::vector<std::vector<double>>& inputs,
                                                 const std::vector<ScalarLayer>& layers,
                                                 const dist::SupportSpec& support) {
  for (const auto& in : inputs) {
    if (in.size() != support.m()) throw ShapeMismatch("brute_force_mix: input not on support");
  }
  std::vector<std::vector<double>> current = inputs;
  for (const auto& layer : layers) current = brute_force_layer(current, layer, support);
  return current;
}

std::size_t count_local_maxima(std::span<const double> probs) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < probs.size()) {
    std::size_t end = i;
    while (end + 1 < probs.size() && probs[end + 1] == probs[i]) ++end;
    const bool left_lower = i == 0 || probs[i - 1] < probs[i];
    const bool right_lower = end + 1 == probs.size() || probs[end + 1] < probs[i];
    if (left_lower && right_lower && !(i == 0 && end + 1 == probs.size())) ++count;
    i = end + 1;
  }
  return count;
}

nlohmann::json CorrelatedDemoReport::to_json() const {
  return {{"dvdn", dist::to_json(dvdn)},
          {"truth", dist::to_json(truth)},
          {"dvdn_mean", dist::expectation(dvdn)},
          {"truth_mean", dist::expectation(truth)},
          {"kl_truth_to_dvdn", kl_truth_to_dvdn}};
}

CorrelatedDemoReport correlated_reward_demo() {
  // Grid {-2, -1, 0, 1, 2}; each agent's own return is +-1 with equal chance.
  const dist::SupportSpec support(-2.0, 2.0, 5);
  const graph::Matrix individual(1, 5, {0.0, 0.5, 0.0, 0.5, 0.0});
  const std::vector<graph::Node> agents{graph::constant(individual), graph::constant(individual)};
  const auto mixed = mixers::dvdn_mix(agents, support);
  const auto row = mixed.value().row(0);
  dist::CategoricalDistribution dvdn(support, {row.begin(), row.end()});
  // The pair always sums to zero.
  dist::CategoricalDistribution truth(support, {0.0, 0.0, 1.0, 0.0, 0.0});
  const double kl = dist::kl_divergence(truth, dvdn);
  return {std::move(dvdn), std::move(truth), kl};
}

}  // namespace catdist::oracle
