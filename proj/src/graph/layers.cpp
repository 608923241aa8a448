#include "catdist/graph/layers.hpp"

#include <cmath>

namespace catdist::graph {

void add_dense_parameters(ParameterSet& params, const std::string& prefix, std::size_t in,
                          std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Matrix w(in, out);
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  Matrix b(1, out);
  for (double& v : b.data()) v = rng.uniform(-bound, bound);
  params.add(prefix + ".w", std::move(w));
  params.add(prefix + ".b", std::move(b));
}

Node apply_dense(const ParameterSet& params, const std::string& prefix, const Node& input) {
  return dense(input, params.at(prefix + ".w"), params.at(prefix + ".b"));
}

}  // namespace catdist::graph
