#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "catdist/envs/matrix_game.hpp"
#include "catdist/graph/parameter_set.hpp"
#include "catdist/mixers/mixers.hpp"
#include "catdist/oracle/oracle.hpp"
#include "catdist/trainer/config.hpp"
#include "catdist/trainer/model.hpp"

namespace catdist::train {

// Projected distributional Bellman target. Terminal: point mass at the reward.
// Otherwise atoms r + gamma * z_j carry next_global's masses. Both cases are
// projected onto the support.
std::vector<double> bellman_target(double reward, bool terminal,
                                   std::optional<std::span<const double>> next_global,
                                   const dist::SupportSpec& support, double gamma);

// Mean cross-entropy between Bellman targets (from target parameters at the
// per-agent greedy next actions) and the online global distribution of the
// taken joint actions. Throws ConfigError on an empty batch.
graph::Node loss_batch(std::span<const envs::Transition* const> batch, const FactorizedModel& model,
                       const graph::ParameterSet& online, const graph::ParameterSet& target,
                       double gamma, mixers::MixStats* stats = nullptr);

struct JointActionReport {
  envs::JointAction joint;
  std::vector<double> learned;
  std::vector<double> truth;
  double mean = 0.0;
  double variance = 0.0;
  double true_mean = 0.0;
  double true_variance = 0.0;
  double kl_to_oracle = 0.0;  // KL(truth || learned)
  double cramer_to_oracle = 0.0;
};

struct EvaluationReport {
  dist::SupportSpec support;
  std::vector<JointActionReport> rows;

  nlohmann::json to_json() const;
  // {atoms, learned_probs, true_probs} per joint action.
  nlohmann::json histogram_json() const;
};

// Compares learned first-step global distributions against the oracle.
EvaluationReport evaluate_distributions(const envs::MatrixGameSpec& game,
                                        const dist::SupportSpec& support,
                                        const std::vector<std::vector<double>>& learned);

// Learned global distribution of every joint action at the first step.
std::vector<std::vector<double>> first_step_distributions(const FactorizedModel& model,
                                                          const graph::ParameterSet& params,
                                                          const envs::MatrixGameSpec& game);

EvaluationReport evaluate(const FactorizedModel& model, const graph::ParameterSet& params,
                          const envs::MatrixGameSpec& game);

struct MetricsRow {
  std::size_t step = 0;
  std::optional<double> loss;  // mean over updates since the previous row
  double epsilon = 0.0;
  double clipping_rate = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> kl;
};

struct TrainResult {
  graph::ParameterSet params;
  graph::ParameterSet target_params;
  std::vector<MetricsRow> metrics;
  std::size_t updates = 0;
  std::size_t env_steps = 0;
};

struct TrainHooks {
  // Called after each gradient step with (update index, loss).
  std::function<void(std::size_t, double)> on_update;
  // Called after each target synchronisation.
  std::function<void(std::size_t)> on_sync;
};

// Deterministic given config.seed.
TrainResult train(const TrainConfig& config, Algorithm algo, const envs::MatrixGameSpec& game,
                  const TrainHooks& hooks = {});

void write_metrics_csv(std::ostream& out, const envs::MatrixGameSpec& game,
                       std::span<const MetricsRow> rows);

// Shortest round-trip decimal form; keeps text outputs byte-stable.
std::string format_double(double value);

}  // namespace catdist::train
