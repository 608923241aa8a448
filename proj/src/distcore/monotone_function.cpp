#include "catdist/distcore/monotone_function.hpp"

#include <algorithm>
#include <cmath>

#include "catdist/common/errors.hpp"

namespace catdist::dist {

double relu(double x) { return x > 0.0 ? x : 0.0; }

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

std::string_view to_string(FunctionTag tag) {
  switch (tag) {
    case FunctionTag::identity:
      return "identity";
    case FunctionTag::relu:
      return "relu";
    case FunctionTag::elu:
      return "elu";
  }
  return "unknown";
}

namespace {

std::function<double(double)> builtin(FunctionTag tag) {
  switch (tag) {
    case FunctionTag::relu:
      return relu;
    case FunctionTag::elu:
      return elu;
    case FunctionTag::identity:
      break;
  }
  return [](double x) { return x; };
}

}  // namespace

MonotoneFunction::MonotoneFunction(FunctionTag tag)
    : MonotoneFunction(std::string(to_string(tag)), builtin(tag), tag) {}

MonotoneFunction::MonotoneFunction(std::string name, std::function<double(double)> fn,
                                   std::optional<FunctionTag> tag)
    : name_(std::move(name)), fn_(std::move(fn)), tag_(tag) {}

MonotoneFunction MonotoneFunction::from_name(std::string_view name) {
  if (name == "identity") return MonotoneFunction(FunctionTag::identity);
  if (name == "relu") return MonotoneFunction(FunctionTag::relu);
  if (name == "elu") return MonotoneFunction(FunctionTag::elu);
  if (name == "abs") {
    throw NonMonotoneFunction("abs is not monotone; it is only valid as a hypernetwork activation");
  }
  throw NonMonotoneFunction("unknown function '" + std::string(name) + "'");
}

MonotoneFunction MonotoneFunction::custom(std::string name, std::function<double(double)> fn,
                                          double probe_lo, double probe_hi) {
  constexpr int kProbes = 20001;
  double previous = fn(probe_lo);
  for (int k = 1; k < kProbes; ++k) {
    const double x = probe_lo + (probe_hi - probe_lo) * k / (kProbes - 1);
    const double y = fn(x);
    const double slack = 1e-12 * std::max({1.0, std::abs(y), std::abs(previous)});
    if (!(y >= previous - slack)) {
      throw NonMonotoneFunction("function '" + name + "' decreases near x = " + std::to_string(x));
    }
    previous = y;
  }
  return MonotoneFunction(std::move(name), std::move(fn), std::nullopt);
}

}  // namespace catdist::dist
