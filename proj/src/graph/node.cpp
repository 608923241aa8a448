#include "catdist/graph/node.hpp"

#include <unordered_set>
#include <utility>

#include "catdist/common/errors.hpp"

namespace catdist::graph {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw ShapeMismatch("matrix data does not match its shape");
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double value) {
  for (double& v : data_) v = value;
}

Matrix& Node::mutable_value() {
  if (!data_->is_leaf) throw ShapeMismatch("only leaf nodes may be modified in place");
  return data_->value;
}

Matrix& Node::mutable_grad() {
  if (!data_->requires_grad) throw ShapeMismatch("node does not track gradients");
  return data_->grad;
}

Node constant(Matrix value) {
  auto data = std::make_shared<NodeData>();
  data->value = std::move(value);
  data->op = "constant";
  return Node(std::move(data));
}

Node variable(Matrix value) {
  auto data = std::make_shared<NodeData>();
  data->grad = Matrix(value.rows(), value.cols());
  data->value = std::move(value);
  data->requires_grad = true;
  data->op = "variable";
  return Node(std::move(data));
}

Node make_node(const char* op, Matrix value, std::vector<Node> parents,
               std::function<void(NodeData&)> backward) {
  auto data = std::make_shared<NodeData>();
  data->op = op;
  data->is_leaf = false;
  bool tracked = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) tracked = tracked || p.requires_grad();
  }
  if (tracked) {
    data->requires_grad = true;
    data->grad = Matrix(value.rows(), value.cols());
    data->parents.reserve(parents.size());
    for (auto& p : parents) data->parents.push_back(p.shared());
    data->backward = std::move(backward);
  }
  data->value = std::move(value);
  return Node(std::move(data));
}

void backward(const Node& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ShapeMismatch("backward needs a scalar (1 x 1) loss");
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order: every node appears after all of its parents.
  std::vector<NodeData*> order;
  std::unordered_set<NodeData*> visited;
  std::vector<std::pair<NodeData*, std::size_t>> stack;
  NodeData* root = loss.get();
  visited.insert(root);
  stack.emplace_back(root, 0);
  while (!stack.empty()) {
    NodeData* node = stack.back().first;
    std::size_t& next = stack.back().second;
    if (next < node->parents.size()) {
      NodeData* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (NodeData* node : order) {
    if (!node->is_leaf) node->grad.fill(0.0);
  }
  root->grad(0, 0) += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

}  // namespace catdist::graph
