#include "catdist/distcore/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "catdist/common/errors.hpp"

namespace catdist::dist {

CategoricalDistribution::CategoricalDistribution(const SupportSpec& support,
                                                 std::vector<double> probs)
    : atoms_(support.atoms()), probs_(std::move(probs)) {
  if (probs_.size() != support.m()) {
    throw InvalidDistribution("expected " + std::to_string(support.m()) + " masses, got " +
                              std::to_string(probs_.size()));
  }
  validate_and_detect_support();
  support_ = support;
}

CategoricalDistribution::CategoricalDistribution(std::vector<double> atoms,
                                                 std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.size() != probs_.size()) {
    throw InvalidDistribution("atom and mass counts differ");
  }
  validate_and_detect_support();
}

CategoricalDistribution CategoricalDistribution::point_mass(double value) {
  return CategoricalDistribution(std::vector<double>{value}, std::vector<double>{1.0});
}

void CategoricalDistribution::validate_and_detect_support() {
  if (probs_.empty()) throw InvalidDistribution("distribution needs at least one atom");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || p > 1.0 + kNormTolerance) {
      throw InvalidDistribution("mass outside [0, 1]: " + std::to_string(p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw InvalidDistribution("masses sum to " + std::to_string(total));
  }
  bool strictly_increasing = true;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (!std::isfinite(atoms_[j])) throw InvalidDistribution("non-finite atom");
    if (j > 0) {
      if (atoms_[j] < atoms_[j - 1]) throw InvalidDistribution("atoms must be non-decreasing");
      if (atoms_[j] == atoms_[j - 1]) strictly_increasing = false;
    }
  }
  support_.reset();
  if (atoms_.size() < 2 || !strictly_increasing) return;
  const double step = (atoms_.back() - atoms_.front()) / static_cast<double>(atoms_.size() - 1);
  double scale = std::abs(step);
  for (double a : atoms_) scale = std::max(scale, std::abs(a));
  for (std::size_t j = 1; j < atoms_.size(); ++j) {
    if (std::abs((atoms_[j] - atoms_[j - 1]) - step) > kUniformSpacingTolerance * scale) return;
  }
  support_ = SupportSpec(atoms_.front(), atoms_.back(), atoms_.size());
}

std::optional<double> CategoricalDistribution::spacing() const {
  if (!support_) return std::nullopt;
  return support_->delta();
}

bool same_atoms(const CategoricalDistribution& a, const CategoricalDistribution& b,
                double rel_tol) {
  if (a.size() != b.size()) return false;
  const auto xa = a.atoms();
  const auto xb = b.atoms();
  double scale = 1.0;
  for (std::size_t j = 0; j < xa.size(); ++j) scale = std::max({scale, std::abs(xa[j])});
  for (std::size_t j = 0; j < xa.size(); ++j) {
    if (std::abs(xa[j] - xb[j]) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace catdist::dist
