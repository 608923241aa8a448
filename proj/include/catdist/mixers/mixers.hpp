#pragma once

#include <span>
#include <string>
#include <vector>

#include "catdist/common/rng.hpp"
#include "catdist/distcore/monotone_function.hpp"
#include "catdist/distcore/support.hpp"
#include "catdist/graph/node.hpp"
#include "catdist/graph/parameter_set.hpp"

namespace catdist::mixers {

// Mass that projections inside a mixer had to clip, relative to all mass they saw.
struct MixStats {
  double clipped = 0.0;
  double total = 0.0;

  double rate() const { return total > 0.0 ? clipped / total : 0.0; }
};

// Weights and biases of one mixing layer for a batch of states.
// weights is B x (n_in * n_out) with w_{i,j} at column i * n_out + j;
// biases is B x n_out.
struct MixerLayerParams {
  graph::Node weights;
  graph::Node biases;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

// Convolution of all individual mass vectors, then one projection back onto
// the shared support. Every input is B x support.m().
graph::Node dvdn_mix(std::span<const graph::Node> individuals, const dist::SupportSpec& support,
                     MixStats* stats = nullptr);

// For every output j: weight each input by w_{i,j}, project, convolve across i,
// add b_j, apply f, project. Throws ShapeMismatch on support mismatch and
// std::invalid_argument on a negative weight.
std::vector<graph::Node> dqmix_layer(std::span<const graph::Node> inputs,
                                     const MixerLayerParams& params, dist::FunctionTag f,
                                     const dist::SupportSpec& support, MixStats* stats = nullptr);

struct DqmixConfig {
  std::size_t n_agents = 2;
  std::size_t state_dim = 2;
  std::size_t hidden = 4;
  dist::SupportSpec support{-10.0, 20.0, 51};
  dist::FunctionTag hidden_function = dist::FunctionTag::elu;
  dist::FunctionTag output_function = dist::FunctionTag::identity;
};

// Two-layer monotone mixer whose weights come from state-conditioned
// hypernetworks. Weight hypernetworks end in abs; the final bias comes from a
// two-layer relu map.
class DqmixMixer {
 public:
  explicit DqmixMixer(DqmixConfig config, std::string prefix = "mixer");

  void init_parameters(graph::ParameterSet& params, Rng& rng) const;

  // layer is 0 (agents -> hidden) or 1 (hidden -> 1). state is B x state_dim.
  MixerLayerParams hypernet_forward(const graph::Node& state, std::size_t layer,
                                    const graph::ParameterSet& params) const;

  graph::Node mix(std::span<const graph::Node> individuals, const graph::Node& state,
                  const graph::ParameterSet& params, MixStats* stats = nullptr) const;

  const DqmixConfig& config() const { return config_; }

 private:
  DqmixConfig config_;
  std::string prefix_;
};

// Builds MixerLayerParams from fixed values (B = 1); used by tests and oracles.
MixerLayerParams constant_layer_params(const std::vector<std::vector<double>>& weights,
                                       const std::vector<double>& biases);

}  // namespace catdist::mixers
