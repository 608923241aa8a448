#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "catdist/graph/matrix.hpp"

namespace catdist::graph {

struct NodeData {
  Matrix value;
  Matrix grad;  // allocated only when requires_grad
  bool requires_grad = false;
  bool is_leaf = true;
  const char* op = "leaf";
  std::vector<std::shared_ptr<NodeData>> parents;
  // Accumulates this node's grad into the parents' grads.
  std::function<void(NodeData&)> backward;
};

// Shared handle to a vertex of the computation DAG. Parents are held by the
// child, so the graph lives as long as its output node.
class Node {
 public:
  Node() = default;
  explicit Node(std::shared_ptr<NodeData> data) : data_(std::move(data)) {}

  const Matrix& value() const { return data_->value; }
  const Matrix& grad() const { return data_->grad; }
  std::size_t rows() const { return data_->value.rows(); }
  std::size_t cols() const { return data_->value.cols(); }
  bool requires_grad() const { return data_->requires_grad; }
  const char* op() const { return data_->op; }
  bool valid() const { return static_cast<bool>(data_); }

  // Leaves only: parameters are updated in place by optimizers.
  Matrix& mutable_value();
  Matrix& mutable_grad();

  NodeData* get() const { return data_.get(); }
  const std::shared_ptr<NodeData>& shared() const { return data_; }

 private:
  std::shared_ptr<NodeData> data_;
};

// Leaf without gradient.
Node constant(Matrix value);
// Leaf that accumulates gradient.
Node variable(Matrix value);

// Builds an interior node. When no parent requires grad the parents and the
// backward closure are dropped, so no-grad evaluation keeps no tape.
Node make_node(const char* op, Matrix value, std::vector<Node> parents,
               std::function<void(NodeData&)> backward);

// Disables tape recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Reverse accumulation from a 1 x 1 node. Interior gradients are reset at the
// start; leaf gradients accumulate until zeroed by the owner.
void backward(const Node& loss);

}  // namespace catdist::graph
