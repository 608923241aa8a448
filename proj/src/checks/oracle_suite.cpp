#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "catdist/checks/suites.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/graph/matrix.hpp"
#include "catdist/mixers/mixers.hpp"
#include "catdist/oracle/oracle.hpp"
#include "random_inputs.hpp"

namespace catdist::checks {

using detail::random_probs;
using detail::Tally;
using graph::Matrix;

namespace {

constexpr std::size_t kLayerTrials = 1000;
constexpr std::size_t kMixerTrials = 100;
constexpr std::size_t kMonteCarloSamples = 1000000;

double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

const std::array kFunctions{dist::FunctionTag::identity, dist::FunctionTag::relu,
                            dist::FunctionTag::elu};

}  // namespace

SuiteReport run_oracle_suite(const CheckOptions& options) {
  Rng rng(options.seed);
  SuiteReport report{"oracle", {}};

  {
    Tally tally("dqmix_layer_vs_enumeration");
    double worst = 0.0;
    for (std::size_t t = 0; t < kLayerTrials; ++t) {
      const auto support = detail::random_support(rng, 2, 7);
      const std::size_t n_in = 1 + rng.uniform_index(3);
      const std::size_t n_out = 1 + rng.uniform_index(3);
      const double span = support.v_max() - support.v_min();
      oracle::ScalarLayer layer;
      layer.function = kFunctions[rng.uniform_index(kFunctions.size())];
      layer.weights.assign(n_in, std::vector<double>(n_out));
      for (auto& row : layer.weights) {
        for (auto& w : row) w = rng.uniform() < 0.05 ? 0.0 : rng.uniform(0.0, 2.0);
      }
      for (std::size_t j = 0; j < n_out; ++j) layer.biases.push_back(rng.uniform(-0.5, 0.5) * span);
      std::vector<std::vector<double>> inputs;
      std::vector<graph::Node> nodes;
      for (std::size_t i = 0; i < n_in; ++i) {
        inputs.push_back(random_probs(support.m(), rng));
        nodes.push_back(graph::constant(Matrix::row_vector(inputs.back())));
      }
      const auto expected = oracle::brute_force_mix(inputs, {layer}, support);
      const auto got = mixers::dqmix_layer(
          nodes, mixers::constant_layer_params(layer.weights, layer.biases), layer.function,
          support);
      double diff = 0.0;
      for (std::size_t j = 0; j < n_out; ++j) {
        diff = std::max(diff, max_abs_diff(expected[j], got[j].value().row(0)));
      }
      worst = std::max(worst, diff);
      tally.trial(diff <= 1e-8, "trial " + std::to_string(t) + " differs by " + std::to_string(diff));
    }
    std::ostringstream os;
    os << "worst difference " << worst;
    tally.note(os.str());
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("dqmix_mixer_vs_enumeration");
    const dist::SupportSpec support(-4.0, 4.0, 5);
    for (std::size_t t = 0; t < kMixerTrials; ++t) {
      mixers::DqmixConfig config;
      config.support = support;
      const mixers::DqmixMixer mixer(config);
      graph::ParameterSet params;
      mixer.init_parameters(params, rng);
      Matrix state(1, config.state_dim);
      for (auto& v : state.data()) v = rng.uniform(-1.0, 1.0);
      const auto state_node = graph::constant(state);

      std::vector<oracle::ScalarLayer> layers;
      const dist::FunctionTag tags[] = {config.hidden_function, config.output_function};
      for (std::size_t k = 0; k < 2; ++k) {
        const auto lp = mixer.hypernet_forward(state_node, k, params);
        oracle::ScalarLayer layer;
        layer.function = tags[k];
        layer.weights.assign(lp.n_in, std::vector<double>(lp.n_out));
        for (std::size_t i = 0; i < lp.n_in; ++i) {
          for (std::size_t j = 0; j < lp.n_out; ++j) {
            layer.weights[i][j] = lp.weights.value()(0, i * lp.n_out + j);
          }
        }
        for (std::size_t j = 0; j < lp.n_out; ++j) layer.biases.push_back(lp.biases.value()(0, j));
        layers.push_back(std::move(layer));
      }
      std::vector<std::vector<double>> inputs;
      std::vector<graph::Node> nodes;
      for (std::size_t i = 0; i < config.n_agents; ++i) {
        inputs.push_back(random_probs(support.m(), rng));
        nodes.push_back(graph::constant(Matrix::row_vector(inputs.back())));
      }
      const auto expected = oracle::brute_force_mix(inputs, layers, support).front();
      const auto got = mixer.mix(nodes, state_node, params);
      const double diff = max_abs_diff(expected, got.value().row(0));
      tally.trial(diff <= 1e-8, "differs by " + std::to_string(diff));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally normalised("discretize_normalised");
    Tally mean("discretize_mean_within_half_spacing");
    const dist::SupportSpec support(-10.0, 20.0, 51);
    for (std::size_t t = 0; t < 1000; ++t) {
      std::vector<envs::GaussianComponent> parts;
      const std::size_t n = 1 + rng.uniform_index(3);
      const auto weights = random_probs(n, rng);
      for (std::size_t c = 0; c < n; ++c) {
        if (weights[c] > 0.0) parts.push_back({weights[c], rng.uniform(-4.0, 14.0), rng.uniform(0.05, 3.0)});
      }
      double total_weight = 0.0;
      for (const auto& p : parts) total_weight += p.weight;
      for (auto& p : parts) p.weight /= total_weight;
      const envs::RewardSpec spec(parts);
      const auto probs = oracle::discretize_reward(spec, support);
      double sum = 0.0;
      bool nonneg = true;
      for (double p : probs) {
        sum += p;
        nonneg = nonneg && p >= 0.0;
      }
      normalised.trial(nonneg && std::abs(sum - 1.0) <= 1e-12);
      const double got = dist::expectation(dist::CategoricalDistribution(support, probs));
      mean.trial(std::abs(got - spec.mean()) <= 0.5 * support.delta(),
                 "mean " + std::to_string(got) + " vs " + std::to_string(spec.mean()));
    }
    report.checks.push_back(normalised.result());
    report.checks.push_back(mean.result());
  }

  {
    const auto game = envs::default_matrix_game();
    const dist::SupportSpec support(-10.0, 20.0, 51);
    const std::size_t bimodal[] = {1, 1};
    const auto probs = oracle::discretize_reward(game.entry(bimodal), support);
    const std::size_t peaks = oracle::count_local_maxima(probs);
    report.checks.push_back({"bimodal_entry_two_maxima", peaks == 2,
                             std::to_string(peaks) + " local maxima"});

    const auto truth = oracle::true_return_distribution(game, {}, support);
    bool same = true;
    for (std::size_t k = 0; k < truth.entries.size(); ++k) {
      same = same &&
             truth.entries[k].probs == oracle::discretize_reward(game.payoff[k], support);
    }
    report.checks.push_back({"one_step_truth_is_discretized_reward", same, ""});
  }

  {
    // Two-step returns r0 + gamma r1 binned onto the grid versus the oracle.
    auto game = envs::default_matrix_game();
    game.horizon = 2;
    const dist::SupportSpec support(-10.0, 20.0, 51);
    const auto continuation = oracle::greedy_continuation(game);
    const auto truth = oracle::true_return_distribution(game, continuation, support);
    Rng mc(options.seed + 1);
    double worst = 0.0;
    for (const auto& entry : truth.entries) {
      std::vector<double> counts(support.m(), 0.0);
      const auto& first = game.entry(entry.joint);
      const auto& later = game.entry(continuation.front());
      for (std::size_t s = 0; s < kMonteCarloSamples; ++s) {
        const double g = first.sample(mc) + game.gamma * later.sample(mc);
        const double pos = (g - support.v_min()) / support.delta();
        const auto idx = static_cast<std::size_t>(
            std::clamp(std::round(pos), 0.0, static_cast<double>(support.m() - 1)));
        counts[idx] += 1.0;
      }
      for (auto& c : counts) c /= static_cast<double>(kMonteCarloSamples);
      const double d = dist::cramer_distance(dist::CategoricalDistribution(support, counts),
                                             dist::CategoricalDistribution(support, entry.probs));
      worst = std::max(worst, d);
    }
    std::ostringstream os;
    os << "largest Cramer distance " << worst << " over " << truth.entries.size()
       << " joint actions";
    report.checks.push_back({"two_step_truth_vs_monte_carlo", worst < 0.02, os.str()});
  }

  {
    const auto demo = oracle::correlated_reward_demo();
    const std::vector<double> expected_dvdn{0.25, 0.0, 0.5, 0.0, 0.25};
    const std::vector<double> expected_truth{0.0, 0.0, 1.0, 0.0, 0.0};
    const bool dvdn_ok = max_abs_diff(expected_dvdn, demo.dvdn.probs()) == 0.0;
    const bool truth_ok = max_abs_diff(expected_truth, demo.truth.probs()) == 0.0;
    const double gap = std::abs(demo.kl_truth_to_dvdn - std::numbers::ln2);
    std::ostringstream os;
    os << "KL " << demo.kl_truth_to_dvdn << ", |KL - log 2| = " << gap;
    report.checks.push_back(
        {"correlated_reward_demo", dvdn_ok && truth_ok && gap <= 1e-9, os.str()});
  }
  return report;
}

}  // namespace catdist::checks
