#pragma once

#include <cstddef>
#include <vector>

namespace catdist::dist {

// Uniform atom grid v_min + j * delta, 0 <= j < m.
class SupportSpec {
 public:
  SupportSpec(double v_min, double v_max, std::size_t m);

  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  std::size_t m() const { return m_; }
  double delta() const { return (v_max_ - v_min_) / static_cast<double>(m_ - 1); }

  // The last atom is v_max exactly.
  double atom(std::size_t j) const;
  std::vector<double> atoms() const;

  bool operator==(const SupportSpec& other) const = default;

 private:
  double v_min_;
  double v_max_;
  std::size_t m_;
};

}  // namespace catdist::dist
