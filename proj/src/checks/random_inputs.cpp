#include "random_inputs.hpp"

#include <algorithm>
#include <cmath>

namespace catdist::checks::detail {

std::vector<double> random_probs(std::size_t m, Rng& rng) {
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& v : p) {
    v = rng.uniform() < 0.15 ? 0.0 : -std::log(1.0 - rng.uniform());
    total += v;
  }
  if (total == 0.0) {
    p[rng.uniform_index(m)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

dist::SupportSpec random_support_with_spacing(Rng& rng, double spacing, std::size_t m_lo,
                                              std::size_t m_hi) {
  const std::size_t m = m_lo + rng.uniform_index(m_hi - m_lo + 1);
  const double v_min = rng.uniform(-10.0, 5.0);
  return {v_min, v_min + spacing * static_cast<double>(m - 1), m};
}

dist::SupportSpec random_support(Rng& rng, std::size_t m_lo, std::size_t m_hi) {
  return random_support_with_spacing(rng, rng.uniform(0.1, 2.0), m_lo, m_hi);
}

dist::CategoricalDistribution random_on(const dist::SupportSpec& support, Rng& rng) {
  return {support, random_probs(support.m(), rng)};
}

dist::CategoricalDistribution random_atoms_in(double lo, double hi, std::size_t n, Rng& rng) {
  std::vector<double> atoms(n);
  for (auto& a : atoms) a = rng.uniform(lo, hi);
  std::sort(atoms.begin(), atoms.end());
  return {std::move(atoms), random_probs(n, rng)};
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void Tally::trial(bool ok, const std::string& what) {
  ++trials_;
  if (ok) return;
  if (failures_++ == 0) first_failure_ = what;
}

CheckResult Tally::result() const {
  std::string detail = std::to_string(failures_) + " failures in " + std::to_string(trials_) +
                       " trials";
  if (failures_ > 0 && !first_failure_.empty()) detail += "; first: " + first_failure_;
  if (!extra_.empty()) detail += "; " + extra_;
  return {name_, failures_ == 0 && trials_ > 0, detail};
}

}  // namespace catdist::checks::detail
