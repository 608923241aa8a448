#pragma once

#include <vector>

#include <json.hpp>

#include "catdist/common/rng.hpp"

namespace catdist::envs {

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 0.0;  // 0 means deterministic
};

// Mixture of Gaussians describing one joint action's reward.
class RewardSpec {
 public:
  explicit RewardSpec(std::vector<GaussianComponent> components);

  static RewardSpec gaussian(double mean, double variance) {
    return RewardSpec({{1.0, mean, variance}});
  }

  const std::vector<GaussianComponent>& components() const { return components_; }

  double mean() const;
  double variance() const;

  // Picks a component by weight, then draws from its Gaussian.
  double sample(Rng& rng) const;

  bool operator==(const RewardSpec& other) const;

 private:
  std::vector<GaussianComponent> components_;
};

nlohmann::json to_json(const RewardSpec& spec);
RewardSpec reward_spec_from_json(const nlohmann::json& j);

}  // namespace catdist::envs
