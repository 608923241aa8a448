#include "catdist/distcore/support.hpp"

#include <cmath>
#include <string>

#include "catdist/common/errors.hpp"

namespace catdist::dist {

SupportSpec::SupportSpec(double v_min, double v_max, std::size_t m)
    : v_min_(v_min), v_max_(v_max), m_(m) {
  if (!std::isfinite(v_min) || !std::isfinite(v_max) || !(v_min < v_max)) {
    throw InvalidSupport("support requires finite v_min < v_max, got [" + std::to_string(v_min) +
                         ", " + std::to_string(v_max) + "]");
  }
  if (m < 2) throw InvalidSupport("support requires at least 2 atoms");
}

double SupportSpec::atom(std::size_t j) const {
  if (j + 1 == m_) return v_max_;
  return v_min_ + static_cast<double>(j) * delta();
}

std::vector<double> SupportSpec::atoms() const {
  std::vector<double> out(m_);
  for (std::size_t j = 0; j < m_; ++j) out[j] = atom(j);
  return out;
}

}  // namespace catdist::dist
