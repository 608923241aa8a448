#include "catdist/envs/matrix_game.hpp"

#include <sstream>

#include "catdist/common/errors.hpp"

namespace catdist::envs {

std::size_t MatrixGameSpec::joint_action_count() const {
  std::size_t count = 1;
  for (std::size_t i = 0; i < agents; ++i) count *= actions;
  return count;
}

std::size_t MatrixGameSpec::joint_index(std::span<const std::size_t> joint) const {
  if (joint.size() != agents) throw ConfigError("joint action has the wrong number of agents");
  std::size_t index = 0;
  for (std::size_t a : joint) {
    if (a >= actions) throw ConfigError("action " + std::to_string(a) + " is undefined");
    index = index * actions + a;
  }
  return index;
}

JointAction MatrixGameSpec::joint_from_index(std::size_t index) const {
  JointAction joint(agents);
  for (std::size_t i = agents; i-- > 0;) {
    joint[i] = index % actions;
    index /= actions;
  }
  return joint;
}

const RewardSpec& MatrixGameSpec::entry(std::span<const std::size_t> joint) const {
  return payoff.at(joint_index(joint));
}

void MatrixGameSpec::validate() const {
  if (actions < 1) throw ConfigError("game needs at least one action per agent");
  if (agents < 1) throw ConfigError("game needs at least one agent");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (payoff.size() != joint_action_count()) {
    throw ConfigError("payoff must define every joint action");
  }
}

MatrixGameSpec default_matrix_game() {
  MatrixGameSpec spec;
  spec.payoff = {
      RewardSpec::gaussian(0.0, 1.0),
      RewardSpec::gaussian(3.0, 1.0),
      RewardSpec::gaussian(5.0, 2.0),
      RewardSpec({{0.5, 1.0, 2.0}, {0.5, 8.0, 2.0}}),
  };
  return spec;
}

std::string joint_key(std::span<const std::size_t> joint) {
  std::string key;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (i > 0) key += ',';
    key += std::to_string(joint[i]);
  }
  return key;
}

nlohmann::json to_json(const MatrixGameSpec& spec) {
  nlohmann::json payoff = nlohmann::json::object();
  for (std::size_t k = 0; k < spec.payoff.size(); ++k) {
    payoff[joint_key(spec.joint_from_index(k))] = to_json(spec.payoff[k]);
  }
  return {{"actions", spec.actions}, {"agents", spec.agents}, {"horizon", spec.horizon},
          {"gamma", spec.gamma},     {"payoff", payoff}};
}

namespace {

JointAction parse_joint_key(const std::string& key) {
  JointAction joint;
  std::stringstream in(key);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const auto value = std::stoul(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      joint.push_back(value);
    } catch (const std::exception&) {
      throw ConfigError("malformed joint action key '" + key + "'");
    }
  }
  return joint;
}

}  // namespace

MatrixGameSpec matrix_game_from_json(const nlohmann::json& j, const MatrixGameSpec& base) {
  if (!j.is_object()) throw ConfigError("game spec must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "actions" && key != "agents" && key != "horizon" && key != "gamma" &&
        key != "payoff") {
      throw ConfigError("unknown game spec key '" + key + "'");
    }
  }
  MatrixGameSpec spec;
  try {
    spec.actions = j.value("actions", base.actions);
    spec.agents = j.value("agents", base.agents);
    spec.horizon = j.value("horizon", base.horizon);
    spec.gamma = j.value("gamma", base.gamma);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed game spec: ") + e.what());
  }
  const bool same_shape = spec.actions == base.actions && spec.agents == base.agents;
  std::vector<std::optional<RewardSpec>> entries(spec.joint_action_count());
  if (same_shape) {
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k] = base.payoff.at(k);
  }
  if (j.contains("payoff")) {
    if (!j["payoff"].is_object()) throw ConfigError("payoff must be an object");
    for (const auto& [key, value] : j["payoff"].items()) {
      const auto joint = parse_joint_key(key);
      entries.at(spec.joint_index(joint)) = reward_spec_from_json(value);
    }
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!entries[k]) {
      throw ConfigError("payoff entry '" + joint_key(spec.joint_from_index(k)) + "' is missing");
    }
    spec.payoff.push_back(*entries[k]);
  }
  spec.validate();
  return spec;
}

std::vector<double> observation(const MatrixGameSpec& spec, std::size_t agent,
                                std::span<const std::size_t> previous_joint) {
  std::vector<double> obs(spec.observation_dim(), 0.0);
  obs[0] = 1.0;
  if (!previous_joint.empty()) obs[1 + previous_joint[agent]] = 1.0;
  obs[1 + spec.actions + agent] = 1.0;
  return obs;
}

std::vector<double> global_state(const MatrixGameSpec& spec, std::size_t t) {
  return {1.0, static_cast<double>(t) / static_cast<double>(spec.horizon)};
}

Transition step(const MatrixGameSpec& spec, std::size_t t,
                std::span<const std::size_t> previous_joint, std::span<const std::size_t> joint,
                Rng& rng) {
  if (t >= spec.horizon) throw ConfigError("step called past the horizon");
  Transition tr;
  tr.actions.assign(joint.begin(), joint.end());
  tr.reward = spec.entry(joint).sample(rng);
  for (std::size_t i = 0; i < spec.agents; ++i) {
    tr.observations.push_back(observation(spec, i, previous_joint));
    tr.next_observations.push_back(observation(spec, i, joint));
  }
  tr.state = global_state(spec, t);
  tr.next_state = global_state(spec, t + 1);
  tr.terminal = t + 1 == spec.horizon;
  return tr;
}

MatrixGame::MatrixGame(MatrixGameSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  spec_.validate();
}

void MatrixGame::reset() {
  t_ = 0;
  previous_.clear();
}

std::vector<std::vector<double>> MatrixGame::observations() const {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < spec_.agents; ++i) out.push_back(observation(spec_, i, previous_));
  return out;
}

Transition MatrixGame::step(std::span<const std::size_t> joint) {
  Transition tr = envs::step(spec_, t_, previous_, joint, rng_);
  previous_.assign(joint.begin(), joint.end());
  ++t_;
  return tr;
}

}  // namespace catdist::envs
