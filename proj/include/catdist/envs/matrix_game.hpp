#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "catdist/common/rng.hpp"
#include "catdist/envs/reward_spec.hpp"

namespace catdist::envs {

using JointAction = std::vector<std::size_t>;

// Cooperative stochastic matrix game, optionally repeated for several steps
// with the same payoff table.
struct MatrixGameSpec {
  std::size_t actions = 2;  // per agent
  std::size_t agents = 2;
  std::size_t horizon = 1;
  double gamma = 0.99;
  // Row-major over joint actions: index = sum_i a_i * actions^(agents-1-i).
  std::vector<RewardSpec> payoff;

  std::size_t joint_action_count() const;
  std::size_t joint_index(std::span<const std::size_t> joint) const;
  JointAction joint_from_index(std::size_t index) const;
  const RewardSpec& entry(std::span<const std::size_t> joint) const;

  std::size_t observation_dim() const { return 1 + actions + agents; }
  std::size_t state_dim() const { return 2; }

  // Throws ConfigError.
  void validate() const;

  bool operator==(const MatrixGameSpec& other) const = default;
};

// 2 x 2 one-step game. (1,1) is the bimodal 0.5 N(1,2) + 0.5 N(8,2); the other
// three entries (0,0) N(0,1), (0,1) N(3,1), (1,0) N(5,2) are configurable defaults.
MatrixGameSpec default_matrix_game();

// "a0,a1,..." keys as used by the config schema.
std::string joint_key(std::span<const std::size_t> joint);

nlohmann::json to_json(const MatrixGameSpec& spec);
// Missing fields and payoff entries are taken from base when its shape matches.
MatrixGameSpec matrix_game_from_json(const nlohmann::json& j,
                                     const MatrixGameSpec& base = default_matrix_game());

struct Transition {
  std::vector<std::vector<double>> observations;  // per agent
  JointAction actions;
  double reward = 0.0;
  std::vector<std::vector<double>> next_observations;
  std::vector<double> state;
  std::vector<double> next_state;
  bool terminal = false;
};

using Episode = std::vector<Transition>;

// [constant token, one-hot previous action, one-hot agent id]. The previous
// action block is all zero at the first step.
std::vector<double> observation(const MatrixGameSpec& spec, std::size_t agent,
                                std::span<const std::size_t> previous_joint);

// [1, t / horizon].
std::vector<double> global_state(const MatrixGameSpec& spec, std::size_t t);

// One interaction at step t (< horizon). previous_joint is empty at t = 0.
Transition step(const MatrixGameSpec& spec, std::size_t t,
                std::span<const std::size_t> previous_joint, std::span<const std::size_t> joint,
                Rng& rng);

// Stateful wrapper that owns a seeded generator.
class MatrixGame {
 public:
  MatrixGame(MatrixGameSpec spec, std::uint64_t seed);

  void reset();
  bool done() const { return t_ >= spec_.horizon; }
  std::size_t t() const { return t_; }
  std::vector<std::vector<double>> observations() const;
  std::vector<double> state() const { return global_state(spec_, t_); }
  Transition step(std::span<const std::size_t> joint);

  const MatrixGameSpec& spec() const { return spec_; }

 private:
  MatrixGameSpec spec_;
  Rng rng_;
  std::size_t t_ = 0;
  JointAction previous_;
};

}  // namespace catdist::envs
