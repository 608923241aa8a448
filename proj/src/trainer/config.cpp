#include "catdist/trainer/config.hpp"

#include <algorithm>
#include <string>

#include "catdist/common/errors.hpp"
#include "catdist/distcore/serialization.hpp"

namespace catdist::train {

std::string_view to_string(Algorithm algo) { return algo == Algorithm::dvdn ? "dvdn" : "dqmix"; }

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "dvdn") return Algorithm::dvdn;
  if (name == "dqmix") return Algorithm::dqmix;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected dvdn or dqmix)");
}

double EpsilonSchedule::at(std::size_t env_step) const {
  if (anneal_steps == 0 || env_step >= anneal_steps) return anneal_steps == 0 ? start : finish;
  const double frac = static_cast<double>(env_step) / static_cast<double>(anneal_steps);
  return start + (finish - start) * frac;
}

void TrainConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (gamma && !(*gamma >= 0.0 && *gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(adam.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("Adam eps must be positive");
  if (batch_episodes == 0 || train_every == 0 || target_sync == 0 || total_env_steps == 0 ||
      eval_every == 0) {
    throw ConfigError("batch_episodes, train_every, target_sync, total_env_steps and eval_every "
                      "must be positive");
  }
  if (buffer_episodes < batch_episodes) {
    throw ConfigError("buffer_episodes must be at least batch_episodes");
  }
  if (!in_unit(epsilon.start) || !in_unit(epsilon.finish)) {
    throw ConfigError("epsilon values must lie in [0, 1]");
  }
  if (!(grad_clip >= 0.0)) throw ConfigError("grad_clip must be non-negative");
  if (mixer_hidden == 0) throw ConfigError("mixer_hidden must be positive");
  if (std::any_of(agent_hidden.begin(), agent_hidden.end(), [](auto w) { return w == 0; })) {
    throw ConfigError("agent hidden widths must be positive");
  }
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json out = {
      {"support", dist::to_json(c.support)},
      {"lr", c.adam.lr},
      {"adam_beta1", c.adam.beta1},
      {"adam_beta2", c.adam.beta2},
      {"adam_eps", c.adam.eps},
      {"batch_episodes", c.batch_episodes},
      {"train_every", c.train_every},
      {"target_sync", c.target_sync},
      {"buffer_episodes", c.buffer_episodes},
      {"total_env_steps", c.total_env_steps},
      {"eval_every", c.eval_every},
      {"epsilon",
       {{"start", c.epsilon.start}, {"finish", c.epsilon.finish},
        {"anneal_steps", c.epsilon.anneal_steps}}},
      {"grad_clip", c.grad_clip},
      {"agent_hidden", c.agent_hidden},
      {"mixer_hidden", c.mixer_hidden},
      {"mixer_hidden_function", dist::to_string(c.mixer_hidden_function)},
      {"mixer_output_function", dist::to_string(c.mixer_output_function)},
      {"seed", c.seed},
  };
  if (c.gamma) out["gamma"] = *c.gamma;
  return out;
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                    const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

}  // namespace

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train section must be an object");
  reject_unknown(j,
                 {"support", "gamma", "lr", "adam_beta1", "adam_beta2", "adam_eps",
                  "batch_episodes", "train_every", "target_sync", "buffer_episodes",
                  "total_env_steps", "eval_every", "epsilon", "grad_clip", "agent_hidden",
                  "mixer_hidden", "mixer_hidden_function", "mixer_output_function", "seed"},
                 "train");
  TrainConfig c;
  try {
    if (j.contains("support")) {
      reject_unknown(j["support"], {"v_min", "v_max", "m"}, "train.support");
      c.support = dist::support_from_json(j["support"]);
    }
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    c.adam.lr = j.value("lr", c.adam.lr);
    c.adam.beta1 = j.value("adam_beta1", c.adam.beta1);
    c.adam.beta2 = j.value("adam_beta2", c.adam.beta2);
    c.adam.eps = j.value("adam_eps", c.adam.eps);
    c.batch_episodes = j.value("batch_episodes", c.batch_episodes);
    c.train_every = j.value("train_every", c.train_every);
    c.target_sync = j.value("target_sync", c.target_sync);
    c.buffer_episodes = j.value("buffer_episodes", c.buffer_episodes);
    c.total_env_steps = j.value("total_env_steps", c.total_env_steps);
    c.eval_every = j.value("eval_every", c.eval_every);
    if (j.contains("epsilon")) {
      const auto& e = j["epsilon"];
      reject_unknown(e, {"start", "finish", "anneal_steps"}, "train.epsilon");
      c.epsilon.start = e.value("start", c.epsilon.start);
      c.epsilon.finish = e.value("finish", c.epsilon.start);
      c.epsilon.anneal_steps = e.value("anneal_steps", c.epsilon.anneal_steps);
    }
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    if (j.contains("agent_hidden")) c.agent_hidden = j["agent_hidden"].get<std::vector<std::size_t>>();
    c.mixer_hidden = j.value("mixer_hidden", c.mixer_hidden);
    if (j.contains("mixer_hidden_function")) {
      c.mixer_hidden_function =
          dist::MonotoneFunction::from_name(j["mixer_hidden_function"].get<std::string>()).tag().value();
    }
    if (j.contains("mixer_output_function")) {
      c.mixer_output_function =
          dist::MonotoneFunction::from_name(j["mixer_output_function"].get<std::string>()).tag().value();
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed train section: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace catdist::train
