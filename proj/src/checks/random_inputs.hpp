#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "catdist/common/rng.hpp"
#include "catdist/checks/suites.hpp"
#include "catdist/distcore/categorical.hpp"
#include "catdist/distcore/support.hpp"

namespace catdist::checks::detail {

// Positive masses with an occasional exact zero, normalised.
std::vector<double> random_probs(std::size_t m, Rng& rng);

// v_min in [-10, 5), spacing in [0.1, 2), m in [m_lo, m_hi].
dist::SupportSpec random_support(Rng& rng, std::size_t m_lo, std::size_t m_hi);
dist::SupportSpec random_support_with_spacing(Rng& rng, double spacing, std::size_t m_lo,
                                              std::size_t m_hi);

dist::CategoricalDistribution random_on(const dist::SupportSpec& support, Rng& rng);

// Increasing, not necessarily uniform atoms inside [lo, hi].
dist::CategoricalDistribution random_atoms_in(double lo, double hi, std::size_t n, Rng& rng);

// Lowest index of the largest value.
std::size_t argmax(std::span<const double> values);

// Collects the outcome of a named check with a running failure count.
class Tally {
 public:
  explicit Tally(std::string name) : name_(std::move(name)) {}

  void trial(bool ok, const std::string& what = {});
  void note(std::string text) { extra_ = std::move(text); }
  CheckResult result() const;

 private:
  std::string name_;
  std::size_t trials_ = 0;
  std::size_t failures_ = 0;
  std::string first_failure_;
  std::string extra_;
};

}  // namespace catdist::checks::detail
