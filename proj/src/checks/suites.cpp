#include "catdist/checks/suites.hpp"

#include <algorithm>

#include "catdist/common/errors.hpp"

namespace catdist::checks {

bool SuiteReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const CheckResult* SuiteReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : checks) {
    items.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"suite", suite}, {"passed", passed()}, {"checks", items}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"distcore", "digm", "gradients", "oracle"};
  return names;
}

SuiteReport run_suite(std::string_view name, const CheckOptions& options) {
  if (name == "distcore") return run_distcore_suite(options);
  if (name == "digm") return run_digm_suite(options);
  if (name == "gradients") return run_gradient_suite(options);
  if (name == "oracle") return run_oracle_suite(options);
  throw ConfigError("unknown suite '" + std::string(name) + "'");
}

}  // namespace catdist::checks
