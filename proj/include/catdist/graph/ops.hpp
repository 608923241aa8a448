#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "catdist/distcore/support.hpp"
#include "catdist/graph/node.hpp"

namespace catdist::graph {

enum class Activation { identity, relu, elu, abs, softmax };

// input (B x in) * weights (in x out) + bias (1 x out).
Node dense(const Node& input, const Node& weights, const Node& bias);

// Elementwise, except softmax which normalises each row. Subgradients at 0 are 0.
Node activation(const Node& input, Activation kind);

// Elementwise with rank-2 broadcasting: each dimension must match or be 1.
Node add(const Node& a, const Node& b);
Node mul(const Node& a, const Node& b);
Node scale(const Node& a, double factor);
Node mean_all(const Node& a);

Node slice_cols(const Node& input, std::size_t start, std::size_t count);
Node slice_rows(const Node& input, std::size_t start, std::size_t count);
// Row r of the result is block indices[r] (of width block) of input row r.
Node select_blocks(const Node& input, std::span<const std::size_t> indices, std::size_t block);
Node concat_rows(std::span<const Node> parts);

// Row-wise projection of (probs, atoms) onto the target grid. atoms may be a
// single row shared by every probs row. Gradients reach both probs and atoms;
// clipped atoms and atoms sitting exactly on a target atom get zero atom gradient.
Node project(const Node& probs, const Node& atoms, const dist::SupportSpec& target);

// Row-wise independent-sum convolution of mass vectors on a common spacing.
Node convolve(const Node& p1, const Node& p2);

// Mean over rows of -sum_j t_j log(max(q_j, 1e-12)). target carries no gradient.
Node cross_entropy(const Matrix& target, const Node& predicted);

// Mass of each probs row whose atoms fall outside the target range (values only).
double clipped_mass(const Matrix& probs, const Matrix& atoms, const dist::SupportSpec& target);

}  // namespace catdist::graph
