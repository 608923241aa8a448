#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "catdist/distcore/categorical.hpp"
#include "catdist/distcore/monotone_function.hpp"
#include "catdist/distcore/support.hpp"
#include "catdist/envs/matrix_game.hpp"
#include "catdist/envs/reward_spec.hpp"

namespace catdist::oracle {

// p_j = sum_c w_c [Phi_c(z_j + delta/2) - Phi_c(z_j - delta/2)]; the first and
// last bins take the open tails so the masses sum to one.
std::vector<double> discretize_reward(const envs::RewardSpec& spec,
                                      const dist::SupportSpec& support);

struct JointActionTruth {
  envs::JointAction joint;
  std::vector<double> probs;
  double mean = 0.0;      // analytic
  double variance = 0.0;  // analytic
};

struct DiscretizedTruth {
  dist::SupportSpec support;
  std::vector<JointActionTruth> entries;  // row-major over initial joint actions
};

// Return distribution of every initial joint action when steps 1..H-1 follow
// `continuation` (one joint action per later step). Later steps are
// discounted by gamma^t, projected, and convolved in.
DiscretizedTruth true_return_distribution(const envs::MatrixGameSpec& game,
                                          const std::vector<envs::JointAction>& continuation,
                                          const dist::SupportSpec& support);

// Continuation used for evaluation: the joint action with the largest mean
// reward, repeated for every later step.
std::vector<envs::JointAction> greedy_continuation(const envs::MatrixGameSpec& game);

// Layer description with plain scalars; weights[i][j] maps input i to output j.
struct ScalarLayer {
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;
  dist::FunctionTag function = dist::FunctionTag::identity;
};

// Enumerates every combination of input atoms layer by layer. Each weighted
// atom is split onto the grid with the hat weights before the sum, and the
// biased, transformed sum is split again, matching the mixing layer's
// projection points. Returns one mass vector per output of the last layer.
std::vector<std::vector<double>> brute_force_mix(const std::vector<std::vector<double>>& inputs,
                                                 const std::vector<ScalarLayer>& layers,
                                                 const dist::SupportSpec& support);

// Strict local maxima of a mass vector; a run of equal values counts once when
// both of its neighbours (where present) are lower.
std::size_t count_local_maxima(std::span<const double> probs);

struct CorrelatedDemoReport {
  dist::CategoricalDistribution dvdn;
  dist::CategoricalDistribution truth;
  double kl_truth_to_dvdn = 0.0;

  nlohmann::json to_json() const;
};

// Two agents rewarded (+1, -1) or (-1, +1) with equal probability: DVDN treats
// the individual returns as independent while the team return is always 0.
CorrelatedDemoReport correlated_reward_demo();

}  // namespace catdist::oracle
