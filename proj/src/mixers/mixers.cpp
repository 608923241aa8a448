#include "catdist/mixers/mixers.hpp"

#include <stdexcept>
#include <string>

#include "catdist/common/errors.hpp"
#include "catdist/graph/layers.hpp"
#include "catdist/graph/ops.hpp"

namespace catdist::mixers {

namespace {

using graph::Matrix;
using graph::Node;

void require_on_support(std::span<const Node> inputs, const dist::SupportSpec& support) {
  if (inputs.empty()) throw ShapeMismatch("mixer needs at least one input distribution");
  for (const auto& in : inputs) {
    if (in.cols() != support.m() || in.rows() != inputs.front().rows()) {
      throw ShapeMismatch("mixer inputs must be B x " + std::to_string(support.m()) +
                          " on the shared support");
    }
  }
}

// Atoms of an n-fold convolution of grid-aligned inputs.
Node convolved_atoms(std::size_t n, const dist::SupportSpec& support) {
  const std::size_t width = n * (support.m() - 1) + 1;
  const double start = static_cast<double>(n) * support.v_min();
  Matrix atoms(1, width);
  for (std::size_t k = 0; k < width; ++k) atoms(0, k) = start + static_cast<double>(k) * support.delta();
  return graph::constant(std::move(atoms));
}

Node convolve_all(std::span<const Node> parts) {
  Node acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = graph::convolve(acc, parts[i]);
  return acc;
}

Node projected(const Node& probs, const Node& atoms, const dist::SupportSpec& support,
               MixStats* stats) {
  if (stats) {
    stats->clipped += graph::clipped_mass(probs.value(), atoms.value(), support);
    for (double p : probs.value().data()) stats->total += p;
  }
  return graph::project(probs, atoms, support);
}

graph::Activation to_activation(dist::FunctionTag f) {
  switch (f) {
    case dist::FunctionTag::relu:
      return graph::Activation::relu;
    case dist::FunctionTag::elu:
      return graph::Activation::elu;
    case dist::FunctionTag::identity:
      break;
  }
  return graph::Activation::identity;
}

}  // namespace

Node dvdn_mix(std::span<const Node> individuals, const dist::SupportSpec& support,
              MixStats* stats) {
  require_on_support(individuals, support);
  const Node sum = convolve_all(individuals);
  return projected(sum, convolved_atoms(individuals.size(), support), support, stats);
}

std::vector<Node> dqmix_layer(std::span<const Node> inputs, const MixerLayerParams& params,
                              dist::FunctionTag f, const dist::SupportSpec& support,
                              MixStats* stats) {
  require_on_support(inputs, support);
  const std::size_t batch = inputs.front().rows();
  if (params.n_in != inputs.size() || params.weights.cols() != params.n_in * params.n_out ||
      params.biases.cols() != params.n_out || params.weights.rows() != batch ||
      params.biases.rows() != batch) {
    throw ShapeMismatch("mixer layer parameters do not match the inputs");
  }
  for (double w : params.weights.value().data()) {
    if (w < 0.0) throw std::invalid_argument("mixer weights must be non-negative");
  }

  const Node grid = graph::constant(Matrix::row_vector(support.atoms()));
  const Node sum_atoms = convolved_atoms(inputs.size(), support);
  std::vector<Node> outputs;
  outputs.reserve(params.n_out);
  std::vector<Node> weighted(inputs.size());
  for (std::size_t j = 0; j < params.n_out; ++j) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const Node w = graph::slice_cols(params.weights, i * params.n_out + j, 1);
      weighted[i] = projected(inputs[i], graph::mul(grid, w), support, stats);  // steps 1-2
    }
    const Node summed = convolve_all(weighted);                                 // step 3
    Node atoms = graph::add(sum_atoms, graph::slice_cols(params.biases, j, 1));  // step 4
    if (f != dist::FunctionTag::identity) atoms = graph::activation(atoms, to_activation(f));  // step 5
    outputs.push_back(projected(summed, atoms, support, stats));                 // step 6
  }
  return outputs;
}

DqmixMixer::DqmixMixer(DqmixConfig config, std::string prefix)
    : config_(config), prefix_(std::move(prefix)) {
  if (config_.n_agents == 0 || config_.hidden == 0 || config_.state_dim == 0) {
    throw ConfigError("mixer dimensions must be positive");
  }
}

void DqmixMixer::init_parameters(graph::ParameterSet& params, Rng& rng) const {
  const std::size_t s = config_.state_dim;
  const std::size_t h = config_.hidden;
  graph::add_dense_parameters(params, prefix_ + ".hyper_w1", s, config_.n_agents * h, rng);
  graph::add_dense_parameters(params, prefix_ + ".hyper_b1", s, h, rng);
  graph::add_dense_parameters(params, prefix_ + ".hyper_w2", s, h, rng);
  graph::add_dense_parameters(params, prefix_ + ".hyper_b2_hidden", s, h, rng);
  graph::add_dense_parameters(params, prefix_ + ".hyper_b2_out", h, 1, rng);
}

MixerLayerParams DqmixMixer::hypernet_forward(const Node& state, std::size_t layer,
                                              const graph::ParameterSet& params) const {
  if (state.cols() != config_.state_dim) {
    throw ShapeMismatch("state has " + std::to_string(state.cols()) + " features, expected " +
                        std::to_string(config_.state_dim));
  }
  MixerLayerParams out;
  if (layer == 0) {
    out.n_in = config_.n_agents;
    out.n_out = config_.hidden;
    out.weights = graph::activation(graph::apply_dense(params, prefix_ + ".hyper_w1", state),
                                    graph::Activation::abs);
    out.biases = graph::apply_dense(params, prefix_ + ".hyper_b1", state);
  } else if (layer == 1) {
    out.n_in = config_.hidden;
    out.n_out = 1;
    out.weights = graph::activation(graph::apply_dense(params, prefix_ + ".hyper_w2", state),
                                    graph::Activation::abs);
    const Node hidden = graph::activation(
        graph::apply_dense(params, prefix_ + ".hyper_b2_hidden", state), graph::Activation::relu);
    out.biases = graph::apply_dense(params, prefix_ + ".hyper_b2_out", hidden);
  } else {
    throw ShapeMismatch("DQMIX has two mixing layers");
  }
  return out;
}

Node DqmixMixer::mix(std::span<const Node> individuals, const Node& state,
                     const graph::ParameterSet& params, MixStats* stats) const {
  if (individuals.size() != config_.n_agents) {
    throw ShapeMismatch("expected one distribution per agent");
  }
  const auto first = hypernet_forward(state, 0, params);
  const auto hidden =
      dqmix_layer(individuals, first, config_.hidden_function, config_.support, stats);
  const auto second = hypernet_forward(state, 1, params);
  return dqmix_layer(hidden, second, config_.output_function, config_.support, stats).front();
}

MixerLayerParams constant_layer_params(const std::vector<std::vector<double>>& weights,
                                       const std::vector<double>& biases) {
  MixerLayerParams out;
  out.n_in = weights.size();
  out.n_out = biases.size();
  Matrix w(1, out.n_in * out.n_out);
  for (std::size_t i = 0; i < out.n_in; ++i) {
    if (weights[i].size() != out.n_out) throw ShapeMismatch("ragged mixer weight table");
    for (std::size_t j = 0; j < out.n_out; ++j) w(0, i * out.n_out + j) = weights[i][j];
  }
  out.weights = graph::constant(std::move(w));
  out.biases = graph::constant(Matrix::row_vector(biases));
  return out;
}

}  // namespace catdist::mixers
