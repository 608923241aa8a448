#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catdist/checks/suites.hpp"
#include "catdist/oracle/oracle.hpp"
#include "catdist/trainer/sweep.hpp"
#include "catdist/trainer/trainer.hpp"

using namespace catdist;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Full exploration on the default game with the declared defaults.
train::TrainConfig recovery_config() {
  train::TrainConfig c;
  c.total_env_steps = 100000;
  c.epsilon = {1.0, 1.0, 0};
  c.seed = 0;
  return c;
}

// Requires every named check of a suite report to pass.
Outcome require_checks(const checks::SuiteReport& report, const std::vector<std::string>& names) {
  Outcome o{true, {}};
  for (const auto& name : names) {
    const auto* c = report.find(name);
    const bool ok = c != nullptr && c->passed;
    o.passed = o.passed && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += name + (ok ? " ok" : " FAILED") + (c ? " (" + c->detail + ")" : " (missing)");
  }
  return o;
}

Outcome criterion_1() {
  const Stopwatch watch;
  const auto game = envs::default_matrix_game();
  const auto config = recovery_config();
  const auto result = train::train(config, train::Algorithm::dqmix, game);
  const train::FactorizedModel model(train::Algorithm::dqmix, game, config);
  const auto report = train::evaluate(model, result.params, game);
  Outcome o{true, {}};
  std::ostringstream detail;
  for (const auto& row : report.rows) {
    const bool mean_ok = std::abs(row.mean - row.true_mean) <= 0.5;
    const bool var_ok = std::abs(row.variance - row.true_variance) / row.true_variance <= 0.3;
    const bool kl_ok = row.kl_to_oracle <= 0.1;
    bool ok = mean_ok && var_ok && kl_ok;
    detail << envs::joint_key(row.joint) << ": mean " << fixed(row.mean, 3) << " vs "
           << fixed(row.true_mean, 3) << ", rel var err "
           << fixed(std::abs(row.variance - row.true_variance) / row.true_variance, 3) << ", KL "
           << fixed(row.kl_to_oracle);
    if (row.joint == envs::JointAction{1, 1}) {
      const auto maxima = oracle::count_local_maxima(row.learned);
      ok = ok && maxima == 2;
      detail << ", " << maxima << " local maxima";
    }
    detail << (ok ? " ok" : " FAILED") << "; ";
    o.passed = o.passed && ok;
  }
  const double secs = watch.seconds();
  o.passed = o.passed && secs <= 15 * 60;
  detail << fixed(secs, 1) << "s";
  o.detail = detail.str();
  return o;
}

Outcome criterion_2() {
  const Stopwatch watch;
  const auto distcore = checks::run_distcore_suite();
  const auto oracle = checks::run_oracle_suite();
  auto o = require_checks(distcore, {"convolution_oracle"});
  const auto layer = require_checks(oracle, {"dqmix_layer_vs_enumeration"});
  const double secs = watch.seconds();
  o.passed = o.passed && layer.passed && secs <= 120;
  o.detail += "; " + layer.detail + "; " + fixed(secs, 1) + "s";
  return o;
}

Outcome criterion_3() {
  return require_checks(checks::run_distcore_suite(),
                        {"projection_preserves_expectation", "convolution_expectation_additive",
                         "argmax_weighting", "argmax_bias", "argmax_convolution_separable",
                         "argmax_projection", "argmax_function_identity", "argmax_function_relu",
                         "argmax_function_elu"});
}

Outcome criterion_4() {
  return require_checks(checks::run_digm_suite(), {"dqmix_greedy_consistency"});
}

Outcome criterion_5() {
  const Stopwatch watch;
  const auto report = checks::run_gradient_suite();
  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    if (!c.passed) ++failed;
  }
  const double secs = watch.seconds();
  Outcome o{failed == 0 && secs <= 60, {}};
  o.detail = std::to_string(report.checks.size() - failed) + "/" +
             std::to_string(report.checks.size()) + " gradient checks pass";
  if (const auto* full = report.find("loss_dqmix_bootstrapped")) o.detail += "; dqmix loss " + full->detail;
  o.detail += "; " + fixed(secs, 1) + "s";
  return o;
}

Outcome criterion_6() {
  const auto demo = oracle::correlated_reward_demo();
  const std::vector<double> dvdn{0.25, 0.0, 0.5, 0.0, 0.25};
  const std::vector<double> truth{0.0, 0.0, 1.0, 0.0, 0.0};
  bool ok = demo.dvdn.size() == 5 && demo.truth.size() == 5;
  for (std::size_t k = 0; ok && k < 5; ++k) {
    ok = std::abs(demo.dvdn.probs()[k] - dvdn[k]) <= 1e-12 &&
         std::abs(demo.truth.probs()[k] - truth[k]) <= 1e-12 &&
         std::abs(demo.dvdn.atoms()[k] - (static_cast<double>(k) - 2.0)) <= 1e-12;
  }
  const double gap = std::abs(demo.kl_truth_to_dvdn - std::numbers::ln2);
  ok = ok && gap <= 1e-9;
  std::ostringstream detail;
  detail << "DVDN {-2:" << demo.dvdn.probs()[0] << ", 0:" << demo.dvdn.probs()[2]
         << ", 2:" << demo.dvdn.probs()[4] << "}, KL " << demo.kl_truth_to_dvdn
         << ", |KL - log 2| = " << gap;
  return {ok, detail.str()};
}

Outcome criterion_7() {
  const Stopwatch watch;
  const auto rows = train::sweep_atoms(recovery_config(), train::Algorithm::dqmix,
                                       envs::default_matrix_game(), train::kDefaultAtomCounts);
  std::vector<std::pair<std::size_t, double>> kl;
  for (const auto& r : rows) {
    if (r.joint == envs::JointAction{1, 1}) kl.emplace_back(r.m, r.kl_to_oracle);
  }
  std::ostringstream detail;
  bool decreasing = true;
  std::optional<double> kl51, kl75;
  for (std::size_t i = 0; i < kl.size(); ++i) {
    detail << "m=" << kl[i].first << " KL " << fixed(kl[i].second) << "; ";
    if (kl[i].first == 51) kl51 = kl[i].second;
    if (kl[i].first == 75) kl75 = kl[i].second;
    if (i > 0 && kl[i].first <= 51 && !(kl[i].second < kl[i - 1].second)) decreasing = false;
  }
  bool saturated = false;
  if (kl51 && kl75) {
    const double change = std::abs(*kl75 - *kl51) / *kl51;
    saturated = change < 0.1;
    detail << "relative change 51->75 " << fixed(change, 3) << "; ";
  }
  const double secs = watch.seconds();
  detail << (decreasing ? "strictly decreasing to 51" : "NOT strictly decreasing to 51") << "; "
         << fixed(secs, 1) << "s";
  return {decreasing && saturated && secs <= 3600, detail.str()};
}

Outcome criterion_8() {
  return {true, "SMAC win rates are excluded at desk scale; no check depends on them"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the categorical mixing library"};
  std::vector<int> selected;
  app.add_option("--criterion,-c", selected, "Criteria to run (default: all)")
      ->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3,
                                                       criterion_4, criterion_5, criterion_6,
                                                       criterion_7, criterion_8};
  if (selected.empty()) {
    for (int i = 1; i <= 8; ++i) selected.push_back(i);
  }
  bool all = true;
  for (const int i : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << i << ": " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
