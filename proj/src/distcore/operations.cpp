#include "catdist/distcore/operations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catdist/common/errors.hpp"

namespace catdist::dist {

namespace {

constexpr double kLogFloor = 1e-12;
// Fractional grid positions this close to an integer are snapped onto the atom,
// which keeps projection onto the own grid exact.
constexpr double kSnapTolerance = 1e-9;

void require_same_atoms(const CategoricalDistribution& p, const CategoricalDistribution& q,
                        const char* what) {
  if (!same_atoms(p, q)) {
    throw SupportMismatch(std::string(what) + " requires identical supports");
  }
}

}  // namespace

CategoricalDistribution weighting(const CategoricalDistribution& x, double w) {
  if (w == 0.0) return CategoricalDistribution::point_mass(0.0);
  const auto atoms = x.atoms();
  const auto probs = x.probs();
  const std::size_t n = x.size();
  std::vector<double> out_atoms(n);
  std::vector<double> out_probs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = w > 0.0 ? j : n - 1 - j;
    out_atoms[j] = w * atoms[src];
    out_probs[j] = probs[src];
  }
  return CategoricalDistribution(std::move(out_atoms), std::move(out_probs));
}

CategoricalDistribution bias(const CategoricalDistribution& x, double b) {
  std::vector<double> out_atoms(x.atoms().begin(), x.atoms().end());
  for (double& a : out_atoms) a += b;
  return CategoricalDistribution(std::move(out_atoms),
                                 std::vector<double>(x.probs().begin(), x.probs().end()));
}

CategoricalDistribution convolve(const CategoricalDistribution& x1,
                                 const CategoricalDistribution& x2) {
  const bool single1 = x1.size() == 1;
  const bool single2 = x2.size() == 1;
  if ((!single1 && !x1.is_uniform()) || (!single2 && !x2.is_uniform())) {
    throw SpacingMismatch("convolution needs uniformly spaced operands; project first");
  }
  double step = 0.0;
  if (!single1 && !single2) {
    const double d1 = *x1.spacing();
    const double d2 = *x2.spacing();
    if (std::abs(d1 - d2) > 1e-9 * std::max(std::abs(d1), std::abs(d2))) {
      throw SpacingMismatch("atom spacings differ: " + std::to_string(d1) + " vs " +
                            std::to_string(d2));
    }
    step = d1;
  } else if (!single1) {
    step = *x1.spacing();
  } else if (!single2) {
    step = *x2.spacing();
  }

  const auto p1 = x1.probs();
  const auto p2 = x2.probs();
  const std::size_t n = p1.size() + p2.size() - 1;
  std::vector<double> masses(n, 0.0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i] == 0.0) continue;
    for (std::size_t k = 0; k < p2.size(); ++k) masses[i + k] += p1[i] * p2[k];
  }
  const double start = x1.atoms().front() + x2.atoms().front();
  if (n == 1) return CategoricalDistribution(std::vector<double>{start}, std::move(masses));
  return CategoricalDistribution(SupportSpec(start, start + step * static_cast<double>(n - 1), n),
                                 std::move(masses));
}

CategoricalDistribution project(const CategoricalDistribution& x, const SupportSpec& target) {
  const std::size_t k_atoms = target.m();
  const double lo = target.v_min();
  const double hi = target.v_max();
  const double step = target.delta();
  std::vector<double> masses(k_atoms, 0.0);
  const auto atoms = x.atoms();
  const auto probs = x.probs();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double p = probs[j];
    if (p == 0.0) continue;
    double pos = (std::clamp(atoms[j], lo, hi) - lo) / step;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < kSnapTolerance) pos = nearest;
    const double lower = std::floor(pos);
    const auto l = static_cast<std::size_t>(lower);
    if (l + 1 >= k_atoms) {
      masses[k_atoms - 1] += p;
      continue;
    }
    const double frac = pos - lower;
    masses[l] += (1.0 - frac) * p;
    if (frac > 0.0) masses[l + 1] += frac * p;
  }
  // Rounding can push a bin that collects all the mass one ulp past 1.
  for (double& m : masses) m = std::min(m, 1.0);
  return CategoricalDistribution(target, std::move(masses));
}

CategoricalDistribution apply_function(const CategoricalDistribution& x,
                                       const MonotoneFunction& f) {
  std::vector<double> out_atoms(x.atoms().begin(), x.atoms().end());
  for (double& a : out_atoms) a = f(a);
  return CategoricalDistribution(std::move(out_atoms),
                                 std::vector<double>(x.probs().begin(), x.probs().end()));
}

double expectation(const CategoricalDistribution& x) {
  const auto atoms = x.atoms();
  const auto probs = x.probs();
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += probs[j] * atoms[j];
  return total;
}

double variance(const CategoricalDistribution& x) {
  const double mean = expectation(x);
  const auto atoms = x.atoms();
  const auto probs = x.probs();
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = atoms[j] - mean;
    total += probs[j] * d * d;
  }
  return total;
}

double kl_divergence(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  require_same_atoms(p, q, "kl_divergence");
  const auto pp = p.probs();
  const auto qq = q.probs();
  double total = 0.0;
  for (std::size_t j = 0; j < pp.size(); ++j) {
    if (pp[j] > 0.0) total += pp[j] * std::log(pp[j] / std::max(qq[j], kLogFloor));
  }
  return total;
}

double cramer_distance(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  require_same_atoms(p, q, "cramer_distance");
  const auto atoms = p.atoms();
  const auto pp = p.probs();
  const auto qq = q.probs();
  double cdf_p = 0.0;
  double cdf_q = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < pp.size(); ++j) {
    cdf_p += pp[j];
    cdf_q += qq[j];
    const double d = cdf_p - cdf_q;
    total += d * d * (atoms[j + 1] - atoms[j]);
  }
  return std::sqrt(total);
}

double clipped_mass(const CategoricalDistribution& x, const SupportSpec& target) {
  const auto atoms = x.atoms();
  const auto probs = x.probs();
  const double slack = kSnapTolerance * target.delta();
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (atoms[j] < target.v_min() - slack || atoms[j] > target.v_max() + slack) total += probs[j];
  }
  return total;
}

}  // namespace catdist::dist
