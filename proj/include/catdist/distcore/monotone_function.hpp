#pragma once

#include <functional>
#include <string>
#include <optional>
#include <string_view>

namespace catdist::dist {

enum class FunctionTag { identity, relu, elu };

std::string_view to_string(FunctionTag tag);

// A non-decreasing scalar function usable as the Function operation.
// Construction is registration: non-monotone candidates are rejected with
// NonMonotoneFunction.
class MonotoneFunction {
 public:
  explicit MonotoneFunction(FunctionTag tag);

  // Accepts "identity", "relu", "elu". "abs" and unknown names throw.
  static MonotoneFunction from_name(std::string_view name);

  // Registers an arbitrary callable after probing monotonicity on a dense grid
  // over [probe_lo, probe_hi].
  static MonotoneFunction custom(std::string name, std::function<double(double)> fn,
                                 double probe_lo = -1e3, double probe_hi = 1e3);

  double operator()(double x) const { return fn_(x); }
  const std::string& name() const { return name_; }
  // Set only for built-in functions.
  std::optional<FunctionTag> tag() const { return tag_; }

 private:
  MonotoneFunction(std::string name, std::function<double(double)> fn,
                   std::optional<FunctionTag> tag);

  std::string name_;
  std::function<double(double)> fn_;
  std::optional<FunctionTag> tag_;
};

double elu(double x);
double relu(double x);

}  // namespace catdist::dist
