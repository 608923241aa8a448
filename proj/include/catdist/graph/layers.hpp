#pragma once

#include <string>

#include "catdist/common/rng.hpp"
#include "catdist/graph/ops.hpp"
#include "catdist/graph/parameter_set.hpp"

namespace catdist::graph {

// Registers "<prefix>.w" (in x out) and "<prefix>.b" (1 x out), both drawn
// from U(-1/sqrt(in), 1/sqrt(in)).
void add_dense_parameters(ParameterSet& params, const std::string& prefix, std::size_t in,
                          std::size_t out, Rng& rng);

Node apply_dense(const ParameterSet& params, const std::string& prefix, const Node& input);

}  // namespace catdist::graph
