#pragma once

#include <vector>

#include "catdist/graph/parameter_set.hpp"

namespace catdist::graph {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig config);

  void step(ParameterSet& params);
  std::size_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
};

void sgd_step(ParameterSet& params, double lr);

// Rescales gradients so their global l2 norm is at most max_norm. Returns the
// norm measured before clipping.
double clip_grad_norm(ParameterSet& params, double max_norm);

}  // namespace catdist::graph
