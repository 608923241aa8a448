#include "catdist/graph/optimizer.hpp"

#include <cmath>

namespace catdist::graph {

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
  for (const auto& [name, node] : params.entries()) {
    first_.emplace_back(node.rows(), node.cols());
    second_.emplace_back(node.rows(), node.cols());
  }
}

void Adam::step(ParameterSet& params) {
  ++t_;
  const double correction1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  std::size_t i = 0;
  for (const auto& [name, node] : params.entries()) {
    Node handle = node;
    auto value = handle.mutable_value().data();
    const auto grad = node.grad().data();
    auto m = first_[i].data();
    auto v = second_[i].data();
    for (std::size_t k = 0; k < value.size(); ++k) {
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * grad[k];
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * grad[k] * grad[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      value[k] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
    ++i;
  }
}

void sgd_step(ParameterSet& params, double lr) {
  for (const auto& [name, node] : params.entries()) {
    Node handle = node;
    auto value = handle.mutable_value().data();
    const auto grad = node.grad().data();
    for (std::size_t k = 0; k < value.size(); ++k) value[k] -= lr * grad[k];
  }
}

double clip_grad_norm(ParameterSet& params, double max_norm) {
  const double norm = params.grad_norm();
  if (max_norm > 0.0 && norm > max_norm) params.scale_grad(max_norm / norm);
  return norm;
}

}  // namespace catdist::graph
