#include "catdist/trainer/trainer.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "catdist/common/errors.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/distcore/serialization.hpp"
#include "catdist/graph/ops.hpp"
#include "catdist/graph/optimizer.hpp"
#include "catdist/trainer/replay_memory.hpp"

namespace catdist::train {

using graph::Matrix;

std::vector<double> bellman_target(double reward, bool terminal,
                                   std::optional<std::span<const double>> next_global,
                                   const dist::SupportSpec& support, double gamma) {
  if (terminal || !next_global) {
    const auto target = dist::project(dist::CategoricalDistribution::point_mass(reward), support);
    return {target.probs().begin(), target.probs().end()};
  }
  if (next_global->size() != support.m()) {
    throw ShapeMismatch("next-state distribution does not match the support");
  }
  const dist::CategoricalDistribution next(support,
                                           {next_global->begin(), next_global->end()});
  const auto target = dist::project(dist::bias(dist::weighting(next, gamma), reward), support);
  return {target.probs().begin(), target.probs().end()};
}

namespace {

struct BatchInputs {
  std::vector<Matrix> observations;  // per agent, B x obs_dim
  std::vector<std::vector<std::size_t>> actions;
  Matrix states;
};

template <typename ObsOf, typename StateOf, typename ActionOf>
BatchInputs gather(std::size_t n_agents, std::size_t batch, ObsOf obs_of, StateOf state_of,
                   ActionOf action_of) {
  BatchInputs in;
  for (std::size_t i = 0; i < n_agents; ++i) {
    const std::size_t dim = obs_of(0, i).size();
    Matrix obs(batch, dim);
    std::vector<std::size_t> acts(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const auto& o = obs_of(b, i);
      std::copy(o.begin(), o.end(), obs.row(b).begin());
      acts[b] = action_of(b, i);
    }
    in.observations.push_back(std::move(obs));
    in.actions.push_back(std::move(acts));
  }
  const std::size_t state_dim = state_of(0).size();
  in.states = Matrix(batch, state_dim);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto& s = state_of(b);
    std::copy(s.begin(), s.end(), in.states.row(b).begin());
  }
  return in;
}

}  // namespace

graph::Node loss_batch(std::span<const envs::Transition* const> batch, const FactorizedModel& model,
                       const graph::ParameterSet& online, const graph::ParameterSet& target,
                       double gamma, mixers::MixStats* stats) {
  if (batch.empty()) throw ConfigError("loss needs at least one transition");
  const auto& support = model.support();
  const std::size_t m = support.m();
  const std::size_t n_agents = model.n_agents();

  Matrix targets(batch.size(), m);
  std::vector<std::size_t> live;  // non-terminal rows
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (!batch[b]->terminal) live.push_back(b);
  }
  std::vector<std::vector<double>> next_global(batch.size());
  if (!live.empty()) {
    graph::NoGradGuard no_grad;
    auto next_in = gather(
        n_agents, live.size(),
        [&](std::size_t b, std::size_t i) -> const std::vector<double>& {
          return batch[live[b]]->next_observations[i];
        },
        [&](std::size_t b) -> const std::vector<double>& { return batch[live[b]]->next_state; },
        [](std::size_t, std::size_t) { return std::size_t{0}; });
    for (std::size_t i = 0; i < n_agents; ++i) {
      const auto dists = model.agent().distributions(target, next_in.observations[i]);
      for (std::size_t b = 0; b < live.size(); ++b) {
        next_in.actions[i][b] = agents::greedy_action(dists[b]);
      }
    }
    const auto next = model.global_distribution(target, next_in.observations, next_in.actions,
                                                next_in.states);
    for (std::size_t b = 0; b < live.size(); ++b) {
      const auto row = next.value().row(b);
      next_global[live[b]].assign(row.begin(), row.end());
    }
  }
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& tr = *batch[b];
    std::optional<std::span<const double>> next;
    if (!tr.terminal) next = std::span<const double>(next_global[b]);
    const auto t = bellman_target(tr.reward, tr.terminal, next, support, gamma);
    std::copy(t.begin(), t.end(), targets.row(b).begin());
  }

  const auto in = gather(
      n_agents, batch.size(),
      [&](std::size_t b, std::size_t i) -> const std::vector<double>& {
        return batch[b]->observations[i];
      },
      [&](std::size_t b) -> const std::vector<double>& { return batch[b]->state; },
      [&](std::size_t b, std::size_t i) { return batch[b]->actions[i]; });
  const auto predicted =
      model.global_distribution(online, in.observations, in.actions, in.states, stats);
  return graph::cross_entropy(targets, predicted);
}

EvaluationReport evaluate_distributions(const envs::MatrixGameSpec& game,
                                        const dist::SupportSpec& support,
                                        const std::vector<std::vector<double>>& learned) {
  const auto truth = oracle::true_return_distribution(game, oracle::greedy_continuation(game),
                                                      support);
  if (learned.size() != truth.entries.size()) {
    throw ShapeMismatch("need one learned distribution per joint action");
  }
  EvaluationReport report{support, {}};
  for (std::size_t k = 0; k < learned.size(); ++k) {
    const auto& entry = truth.entries[k];
    const dist::CategoricalDistribution p(support, entry.probs);
    const dist::CategoricalDistribution q(support, learned[k]);
    JointActionReport row;
    row.joint = entry.joint;
    row.learned = learned[k];
    row.truth = entry.probs;
    row.mean = dist::expectation(q);
    row.variance = dist::variance(q);
    row.true_mean = entry.mean;
    row.true_variance = entry.variance;
    row.kl_to_oracle = dist::kl_divergence(p, q);
    row.cramer_to_oracle = dist::cramer_distance(p, q);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<std::vector<double>> first_step_distributions(const FactorizedModel& model,
                                                          const graph::ParameterSet& params,
                                                          const envs::MatrixGameSpec& game) {
  graph::NoGradGuard no_grad;
  const std::size_t joints = game.joint_action_count();
  const envs::JointAction none;
  std::vector<std::vector<double>> obs;
  for (std::size_t i = 0; i < game.agents; ++i) obs.push_back(envs::observation(game, i, none));
  const auto state = envs::global_state(game, 0);
  const auto in = gather(
      game.agents, joints,
      [&](std::size_t, std::size_t i) -> const std::vector<double>& { return obs[i]; },
      [&](std::size_t) -> const std::vector<double>& { return state; },
      [&](std::size_t b, std::size_t i) { return game.joint_from_index(b)[i]; });
  const auto global = model.global_distribution(params, in.observations, in.actions, in.states);
  std::vector<std::vector<double>> out;
  for (std::size_t b = 0; b < joints; ++b) {
    const auto row = global.value().row(b);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

EvaluationReport evaluate(const FactorizedModel& model, const graph::ParameterSet& params,
                          const envs::MatrixGameSpec& game) {
  return evaluate_distributions(game, model.support(),
                                first_step_distributions(model, params, game));
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"joint_action", envs::joint_key(r.joint)},
                         {"mean", r.mean},
                         {"variance", r.variance},
                         {"true_mean", r.true_mean},
                         {"true_variance", r.true_variance},
                         {"kl_to_oracle", r.kl_to_oracle},
                         {"cramer_to_oracle", r.cramer_to_oracle}});
  }
  return {{"support", dist::to_json(support)}, {"joint_actions", rows_json}};
}

nlohmann::json EvaluationReport::histogram_json() const {
  nlohmann::json out = nlohmann::json::object();
  out["atoms"] = support.atoms();
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& r : rows) {
    entries[envs::joint_key(r.joint)] = {{"learned_probs", r.learned}, {"true_probs", r.truth}};
  }
  out["joint_actions"] = std::move(entries);
  return out;
}

TrainResult train(const TrainConfig& config, Algorithm algo, const envs::MatrixGameSpec& game,
                  const TrainHooks& hooks) {
  config.validate();
  game.validate();
  const double gamma = config.gamma.value_or(game.gamma);

  Rng root(config.seed);
  Rng init_rng(root.fork_seed());
  Rng act_rng(root.fork_seed());
  Rng replay_rng(root.fork_seed());
  envs::MatrixGame env(game, root.fork_seed());

  const FactorizedModel model(algo, game, config);
  TrainResult result;
  model.init_parameters(result.params, init_rng);
  result.target_params = result.params.clone();
  graph::Adam adam(result.params, config.adam);
  ReplayMemory memory(config.buffer_episodes);

  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  mixers::MixStats window_stats;
  std::size_t episodes = 0;

  auto emit_row = [&](double epsilon) {
    MetricsRow row;
    row.step = result.env_steps;
    if (loss_count > 0) row.loss = loss_sum / static_cast<double>(loss_count);
    row.epsilon = epsilon;
    row.clipping_rate = window_stats.rate();
    for (const auto& r : evaluate(model, result.params, game).rows) {
      row.mean.push_back(r.mean);
      row.variance.push_back(r.variance);
      row.kl.push_back(r.kl_to_oracle);
    }
    result.metrics.push_back(std::move(row));
    loss_sum = 0.0;
    loss_count = 0;
    window_stats = {};
  };

  double epsilon = config.epsilon.at(0);
  while (result.env_steps < config.total_env_steps) {
    env.reset();
    envs::Episode episode;
    while (!env.done()) {
      epsilon = config.epsilon.at(result.env_steps);
      envs::JointAction joint(game.agents);
      if (epsilon >= 1.0) {
        for (auto& a : joint) a = act_rng.uniform_index(game.actions);
      } else {
        const auto obs = env.observations();
        for (std::size_t i = 0; i < game.agents; ++i) {
          const auto dists = agents::agent_forward(model.agent(), obs[i], result.params);
          joint[i] = agents::epsilon_greedy(dists, epsilon, act_rng);
        }
      }
      episode.push_back(env.step(joint));
      ++result.env_steps;
      if (result.env_steps % config.eval_every == 0) emit_row(epsilon);
    }
    memory.push(std::move(episode));
    ++episodes;

    if (episodes % config.train_every == 0 && memory.size() >= config.batch_episodes) {
      std::vector<const envs::Transition*> batch;
      for (const auto* ep : memory.sample(config.batch_episodes, replay_rng)) {
        for (const auto& tr : *ep) batch.push_back(&tr);
      }
      result.params.zero_grad();
      const auto loss = loss_batch(batch, model, result.params, result.target_params, gamma,
                                   &window_stats);
      graph::backward(loss);
      if (config.grad_clip > 0.0) graph::clip_grad_norm(result.params, config.grad_clip);
      adam.step(result.params);
      const double value = loss.value()(0, 0);
      loss_sum += value;
      ++loss_count;
      ++result.updates;
      if (hooks.on_update) hooks.on_update(result.updates, value);
      if (result.updates % config.target_sync == 0) {
        graph::sync(result.params, result.target_params);
        if (hooks.on_sync) hooks.on_sync(result.updates);
      }
    }
  }
  if (result.metrics.empty() || result.metrics.back().step != result.env_steps) emit_row(epsilon);
  return result;
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("could not format number");
  return std::string(buf, end);
}

void write_metrics_csv(std::ostream& out, const envs::MatrixGameSpec& game,
                       std::span<const MetricsRow> rows) {
  std::vector<std::string> keys;
  for (std::size_t k = 0; k < game.joint_action_count(); ++k) {
    std::string key;
    for (auto a : game.joint_from_index(k)) key += "_" + std::to_string(a);
    keys.push_back(key);
  }
  out << "step,loss,epsilon,clipping_rate";
  for (const char* prefix : {"mean", "var", "kl"}) {
    for (const auto& key : keys) out << ',' << prefix << key;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.step << ',' << (row.loss ? format_double(*row.loss) : "") << ','
        << format_double(row.epsilon) << ',' << format_double(row.clipping_rate);
    for (const auto* series : {&row.mean, &row.variance, &row.kl}) {
      for (double v : *series) out << ',' << format_double(v);
    }
    out << '\n';
  }
}

}  // namespace catdist::train
