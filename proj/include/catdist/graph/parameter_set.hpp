#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "catdist/graph/node.hpp"

namespace catdist::graph {

// Named parameters in insertion order. Names are unique.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(ParameterSet&&) noexcept = default;
  ParameterSet& operator=(ParameterSet&&) noexcept = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;

  const Node& add(std::string name, Matrix init);
  const Node& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, Node>>& entries() const { return entries_; }

  void zero_grad();
  double grad_norm() const;
  void scale_grad(double factor);

  // Hard copy of values into a structurally identical set.
  void copy_to(ParameterSet& target) const;
  ParameterSet clone() const;

  bool values_equal(const ParameterSet& other) const;

  void save(std::ostream& out) const;
  static ParameterSet load(std::istream& in);
  void save_file(const std::string& path) const;
  static ParameterSet load_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, Node>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Hard copy used for target networks.
void sync(const ParameterSet& source, ParameterSet& target);

}  // namespace catdist::graph
