#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catdist/distcore/categorical.hpp"

namespace catdist::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
  nlohmann::json to_json() const;
};

using ConvolveFn = std::function<dist::CategoricalDistribution(
    const dist::CategoricalDistribution&, const dist::CategoricalDistribution&)>;

struct CheckOptions {
  std::uint64_t seed = 0;
  // Replaces the convolution under test; used to confirm the suite can fail.
  ConvolveFn convolve;
};

// Shifts every convolved mass one atom to the right.
dist::CategoricalDistribution corrupted_convolve(const dist::CategoricalDistribution& x1,
                                                 const dist::CategoricalDistribution& x2);

// Normalisation closure, convolution oracle, projection and convolution laws,
// and the argmax propositions over randomized action families.
SuiteReport run_distcore_suite(const CheckOptions& options = {});

// Greedy consistency and monotonicity of randomly parameterized DQMIX mixers.
SuiteReport run_digm_suite(const CheckOptions& options = {});

// Central finite differences against every differentiable graph op and the
// full training loss on a one-transition batch.
SuiteReport run_gradient_suite(const CheckOptions& options = {});

// Mixing-layer enumeration oracle, reward discretization, Monte Carlo return
// check, and the correlated-reward demonstration.
SuiteReport run_oracle_suite(const CheckOptions& options = {});

const std::vector<std::string>& suite_names();
// Throws ConfigError on an unknown name.
SuiteReport run_suite(std::string_view name, const CheckOptions& options = {});

}  // namespace catdist::checks
