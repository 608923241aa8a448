#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "catdist/checks/suites.hpp"
#include "catdist/distcore/operations.hpp"
#include "random_inputs.hpp"

namespace catdist::checks {

using detail::argmax;
using detail::random_atoms_in;
using detail::random_on;
using detail::random_support;
using detail::random_support_with_spacing;
using detail::Tally;
using dist::CategoricalDistribution;

namespace {

constexpr std::size_t kClosureTrials = 10000;
constexpr std::size_t kOracleTrials = 10000;
constexpr std::size_t kPropertyTrials = 1000;

bool normalised(const CategoricalDistribution& x) {
  double total = 0.0;
  for (double p : x.probs()) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= dist::kNormTolerance;
}

bool close_masses(const CategoricalDistribution& a, const CategoricalDistribution& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.probs()[k] - b.probs()[k]) > tol) return false;
    const double scale = std::max(1.0, std::abs(a.atoms()[k]));
    if (std::abs(a.atoms()[k] - b.atoms()[k]) > tol * scale) return false;
  }
  return true;
}

// Double loop over outcome pairs; each pair's mass goes to the result atom
// closest to its value.
bool matches_pair_enumeration(const CategoricalDistribution& x1, const CategoricalDistribution& x2,
                              const CategoricalDistribution& result, double spacing,
                              std::string& why) {
  const std::size_t expected_size = x1.size() + x2.size() - 1;
  if (result.size() != expected_size) {
    why = "size " + std::to_string(result.size()) + " != " + std::to_string(expected_size);
    return false;
  }
  const double start = x1.atoms()[0] + x2.atoms()[0];
  std::vector<double> masses(expected_size, 0.0);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    for (std::size_t k = 0; k < x2.size(); ++k) {
      const double value = x1.atoms()[i] + x2.atoms()[k];
      for (std::size_t r = 0; r < expected_size; ++r) {
        if (std::abs(value - result.atoms()[r]) < 0.5 * spacing) {
          masses[r] += x1.probs()[i] * x2.probs()[k];
          break;
        }
      }
    }
  }
  for (std::size_t r = 0; r < expected_size; ++r) {
    const double atom = start + static_cast<double>(r) * spacing;
    if (std::abs(result.atoms()[r] - atom) > 1e-12 * std::max(1.0, std::abs(atom))) {
      why = "atom " + std::to_string(r) + " misplaced";
      return false;
    }
    if (std::abs(result.probs()[r] - masses[r]) > 1e-12) {
      std::ostringstream os;
      os << "mass at atom " << r << ": " << result.probs()[r] << " vs " << masses[r];
      why = os.str();
      return false;
    }
  }
  return true;
}

std::vector<CategoricalDistribution> random_family(const dist::SupportSpec& support,
                                                   std::size_t n, Rng& rng) {
  std::vector<CategoricalDistribution> family;
  for (std::size_t a = 0; a < n; ++a) family.push_back(random_on(support, rng));
  return family;
}

template <typename Transform>
std::size_t transformed_argmax(const std::vector<CategoricalDistribution>& family,
                               Transform transform) {
  std::vector<double> values;
  for (const auto& x : family) values.push_back(dist::expectation(transform(x)));
  return argmax(values);
}

std::size_t plain_argmax(const std::vector<CategoricalDistribution>& family) {
  return transformed_argmax(family, [](const CategoricalDistribution& x) { return x; });
}

}  // namespace

CategoricalDistribution corrupted_convolve(const CategoricalDistribution& x1,
                                           const CategoricalDistribution& x2) {
  const auto exact = dist::convolve(x1, x2);
  std::vector<double> probs(exact.probs().begin(), exact.probs().end());
  std::rotate(probs.rbegin(), probs.rbegin() + 1, probs.rend());
  return {std::vector<double>(exact.atoms().begin(), exact.atoms().end()), std::move(probs)};
}

SuiteReport run_distcore_suite(const CheckOptions& options) {
  const ConvolveFn convolve =
      options.convolve ? options.convolve : ConvolveFn(&dist::convolve);
  Rng rng(options.seed);
  SuiteReport report{"distcore", {}};

  {
    Tally tally("normalization_closure");
    const std::array functions{dist::FunctionTag::identity, dist::FunctionTag::relu,
                               dist::FunctionTag::elu};
    for (std::size_t t = 0; t < kClosureTrials; ++t) {
      const auto support = random_support(rng, 2, 12);
      const auto x = random_on(support, rng);
      const auto y = random_on(random_support_with_spacing(rng, support.delta(), 2, 12), rng);
      const double w = rng.uniform() < 0.05 ? 0.0 : rng.uniform(-3.0, 3.0);
      const auto target = random_support(rng, 2, 12);
      const dist::MonotoneFunction f(functions[rng.uniform_index(functions.size())]);
      const bool ok = normalised(dist::weighting(x, w)) &&
                      normalised(dist::bias(x, rng.uniform(-10.0, 10.0))) &&
                      normalised(convolve(x, y)) && normalised(dist::project(x, target)) &&
                      normalised(dist::apply_function(x, f));
      tally.trial(ok, "trial " + std::to_string(t));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("convolution_oracle");
    for (std::size_t t = 0; t < kOracleTrials; ++t) {
      const auto s1 = random_support(rng, 2, 12);
      const auto s2 = random_support_with_spacing(rng, s1.delta(), 2, 12);
      const auto x1 = random_on(s1, rng);
      const auto x2 = random_on(s2, rng);
      std::string why;
      const bool ok = matches_pair_enumeration(x1, x2, convolve(x1, x2), s1.delta(), why);
      tally.trial(ok, why);
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally commutative("convolution_commutative");
    Tally associative("convolution_associative");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto s = random_support(rng, 2, 12);
      const auto x = random_on(s, rng);
      const auto y = random_on(random_support_with_spacing(rng, s.delta(), 2, 12), rng);
      const auto z = random_on(random_support_with_spacing(rng, s.delta(), 2, 12), rng);
      commutative.trial(close_masses(convolve(x, y), convolve(y, x), 1e-12));
      associative.trial(
          close_masses(convolve(convolve(x, y), z), convolve(x, convolve(y, z)), 1e-12));
    }
    report.checks.push_back(commutative.result());
    report.checks.push_back(associative.result());
  }

  {
    Tally tally("projection_idempotent");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto target = random_support(rng, 2, 12);
      const double span = target.v_max() - target.v_min();
      const auto x = random_atoms_in(target.v_min() - 0.3 * span, target.v_max() + 0.3 * span,
                                     1 + rng.uniform_index(12), rng);
      const auto once = dist::project(x, target);
      const auto twice = dist::project(once, target);
      tally.trial(std::equal(once.probs().begin(), once.probs().end(), twice.probs().begin()));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("projection_preserves_expectation");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto target = random_support(rng, 2, 12);
      const auto x =
          random_atoms_in(target.v_min(), target.v_max(), 1 + rng.uniform_index(12), rng);
      const double diff =
          std::abs(dist::expectation(dist::project(x, target)) - dist::expectation(x));
      tally.trial(diff <= 1e-9, "difference " + std::to_string(diff));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("convolution_expectation_additive");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto s = random_support(rng, 2, 12);
      const auto x = random_on(s, rng);
      const auto y = random_on(random_support_with_spacing(rng, s.delta(), 2, 12), rng);
      const double diff = std::abs(dist::expectation(convolve(x, y)) -
                                   (dist::expectation(x) + dist::expectation(y)));
      tally.trial(diff <= 1e-9, "difference " + std::to_string(diff));
    }
    report.checks.push_back(tally.result());
  }

  const auto family_size = [&rng] { return 2 + rng.uniform_index(4); };

  {
    Tally tally("argmax_weighting");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto family = random_family(random_support(rng, 2, 12), family_size(), rng);
      const double w = rng.uniform(1e-3, 5.0);
      tally.trial(plain_argmax(family) ==
                      transformed_argmax(family, [w](const auto& x) { return dist::weighting(x, w); }),
                  "w = " + std::to_string(w));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("argmax_bias");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto family = random_family(random_support(rng, 2, 12), family_size(), rng);
      const double b = rng.uniform(-10.0, 10.0);
      tally.trial(plain_argmax(family) ==
                      transformed_argmax(family, [b](const auto& x) { return dist::bias(x, b); }),
                  "b = " + std::to_string(b));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("argmax_convolution_separable");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto s1 = random_support(rng, 2, 12);
      const auto s2 = random_support_with_spacing(rng, s1.delta(), 2, 12);
      const auto f1 = random_family(s1, family_size(), rng);
      const auto f2 = random_family(s2, family_size(), rng);
      std::vector<double> joint;
      for (const auto& x1 : f1) {
        for (const auto& x2 : f2) joint.push_back(dist::expectation(convolve(x1, x2)));
      }
      const std::size_t best = argmax(joint);
      tally.trial(best / f2.size() == plain_argmax(f1) && best % f2.size() == plain_argmax(f2));
    }
    report.checks.push_back(tally.result());
  }

  {
    Tally tally("argmax_projection");
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto target = random_support(rng, 2, 12);
      std::vector<CategoricalDistribution> family;
      const std::size_t n = family_size();
      for (std::size_t a = 0; a < n; ++a) {
        family.push_back(
            random_atoms_in(target.v_min(), target.v_max(), 1 + rng.uniform_index(12), rng));
      }
      tally.trial(plain_argmax(family) ==
                  transformed_argmax(family,
                                     [&](const auto& x) { return dist::project(x, target); }));
    }
    report.checks.push_back(tally.result());
  }

  for (const auto tag : {dist::FunctionTag::identity, dist::FunctionTag::relu,
                         dist::FunctionTag::elu}) {
    Tally tally("argmax_function_" + std::string(dist::to_string(tag)));
    const dist::MonotoneFunction f(tag);
    for (std::size_t t = 0; t < kPropertyTrials; ++t) {
      const auto family = random_family(random_support(rng, 2, 12), family_size(), rng);
      tally.trial(plain_argmax(family) ==
                      transformed_argmax(family,
                                         [&f](const auto& x) { return dist::apply_function(x, f); }),
                  "trial " + std::to_string(t));
    }
    report.checks.push_back(tally.result());
  }

  return report;
}

}  // namespace catdist::checks
