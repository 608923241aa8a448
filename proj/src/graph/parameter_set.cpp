#include "catdist/graph/parameter_set.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "catdist/common/errors.hpp"

namespace catdist::graph {

namespace {

constexpr char kMagic[8] = {'C', 'D', 'P', 'S', '0', '0', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ConfigError("truncated parameter checkpoint");
  return v;
}

}  // namespace

const Node& ParameterSet::add(std::string name, Matrix init) {
  if (index_.contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), variable(std::move(init)));
  return entries_.back().second;
}

const Node& ParameterSet::at(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second].second;
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

void ParameterSet::zero_grad() {
  for (auto& [name, node] : entries_) node.mutable_grad().fill(0.0);
}

double ParameterSet::grad_norm() const {
  double total = 0.0;
  for (const auto& [name, node] : entries_) {
    for (double g : node.grad().data()) total += g * g;
  }
  return std::sqrt(total);
}

void ParameterSet::scale_grad(double factor) {
  for (auto& [name, node] : entries_) {
    for (double& g : node.mutable_grad().data()) g *= factor;
  }
}

void ParameterSet::copy_to(ParameterSet& target) const {
  if (target.entries_.size() != entries_.size()) {
    throw ShapeMismatch("copy_to: parameter sets differ in size");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& [name, node] = entries_[i];
    auto& [target_name, target_node] = target.entries_[i];
    if (name != target_name || !node.value().same_shape(target_node.value())) {
      throw ShapeMismatch("copy_to: mismatch at parameter '" + name + "'");
    }
    target_node.mutable_value() = node.value();
  }
}

ParameterSet ParameterSet::clone() const {
  ParameterSet out;
  for (const auto& [name, node] : entries_) out.add(name, node.value());
  return out;
}

bool ParameterSet::values_equal(const ParameterSet& other) const {
  if (other.entries_.size() != entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first) return false;
    const auto a = entries_[i].second.value();
    const auto b = other.entries_[i].second.value();
    if (!a.same_shape(b)) return false;
    if (std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

void ParameterSet::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, entries_.size());
  for (const auto& [name, node] : entries_) {
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, node.rows());
    write_u64(out, node.cols());
    out.write(reinterpret_cast<const char*>(node.value().data().data()),
              static_cast<std::streamsize>(node.value().size() * sizeof(double)));
  }
  if (!out) throw ConfigError("failed to write parameter checkpoint");
}

ParameterSet ParameterSet::load(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("not a parameter checkpoint");
  }
  ParameterSet out;
  const auto count = read_u64(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_u64(in);
    if (name_len > 4096) throw ConfigError("corrupt parameter checkpoint");
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const auto rows = read_u64(in);
    const auto cols = read_u64(in);
    if (rows * cols > (1u << 28)) throw ConfigError("corrupt parameter checkpoint");
    Matrix value(rows, cols);
    in.read(reinterpret_cast<char*>(value.data().data()),
            static_cast<std::streamsize>(value.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated parameter checkpoint");
    out.add(std::move(name), std::move(value));
  }
  return out;
}

void ParameterSet::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  save(out);
}

ParameterSet ParameterSet::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  return load(in);
}

void sync(const ParameterSet& source, ParameterSet& target) { source.copy_to(target); }

}  // namespace catdist::graph
