#pragma once

#include <optional>
#include <span>
#include <vector>

#include "catdist/distcore/support.hpp"

namespace catdist::dist {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kUniformSpacingTolerance = 1e-12;

// Probability masses on an explicit, non-decreasing atom list. When the atoms
// form a uniform grid the matching SupportSpec is kept alongside.
class CategoricalDistribution {
 public:
  CategoricalDistribution(const SupportSpec& support, std::vector<double> probs);
  CategoricalDistribution(std::vector<double> atoms, std::vector<double> probs);

  static CategoricalDistribution point_mass(double value);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  // Present iff the atoms are strictly increasing and uniformly spaced.
  const std::optional<SupportSpec>& support() const { return support_; }
  bool is_uniform() const { return support_.has_value(); }

  // Uniform spacing, or nullopt for single-atom or non-uniform lists.
  std::optional<double> spacing() const;

 private:
  void validate_and_detect_support();

  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::optional<SupportSpec> support_;
};

// True when the atoms are pairwise equal within a relative tolerance.
bool same_atoms(const CategoricalDistribution& a, const CategoricalDistribution& b,
                double rel_tol = 1e-9);

}  // namespace catdist::dist
