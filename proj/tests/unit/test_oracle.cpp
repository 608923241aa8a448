#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "catdist/distcore/operations.hpp"
#include "catdist/mixers/mixers.hpp"
#include "catdist/oracle/oracle.hpp"

using namespace catdist;

namespace {

const dist::SupportSpec kSupport(-10.0, 20.0, 51);

double mass_mean(const std::vector<double>& probs, const dist::SupportSpec& s) {
  double mean = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) mean += probs[k] * s.atom(k);
  return mean;
}

}  // namespace

TEST_CASE("reward discretization") {
  const auto g = envs::default_matrix_game();
  for (const auto& spec : g.payoff) {
    const auto p = oracle::discretize_reward(spec, kSupport);
    double total = 0.0;
    for (double v : p) total += v;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(std::abs(mass_mean(p, kSupport) - spec.mean()) < 0.5 * kSupport.delta());
  }
  // A deterministic reward on an atom is a point mass there.
  const auto point = oracle::discretize_reward(envs::RewardSpec::gaussian(5.0, 0.0), kSupport);
  CHECK(point[25] == 1.0);
  // Tails beyond the grid land in the end bins.
  const auto far = oracle::discretize_reward(envs::RewardSpec::gaussian(-50.0, 1.0), kSupport);
  CHECK(far[0] == doctest::Approx(1.0));
}

TEST_CASE("one-step truth of the default game") {
  const auto g = envs::default_matrix_game();
  const auto truth = oracle::true_return_distribution(g, {}, kSupport);
  REQUIRE(truth.entries.size() == 4);
  CHECK(truth.entries[3].joint == envs::JointAction{1, 1});
  CHECK(oracle::count_local_maxima(truth.entries[3].probs) == 2);
  CHECK(oracle::count_local_maxima(truth.entries[0].probs) == 1);
  CHECK(truth.entries[3].mean == doctest::Approx(4.5));
  CHECK(truth.entries[3].variance == doctest::Approx(14.25));
  CHECK_THROWS(oracle::true_return_distribution(g, {{0, 0}}, kSupport));
}

TEST_CASE("repeated game truth adds discounted moments") {
  auto g = envs::default_matrix_game();
  g.horizon = 3;
  g.gamma = 0.5;
  const auto cont = oracle::greedy_continuation(g);
  REQUIRE(cont.size() == 2);
  CHECK(cont[0] == envs::JointAction{1, 0});
  const auto truth = oracle::true_return_distribution(g, cont, kSupport);
  const auto& row = truth.entries[0];
  CHECK(row.mean == doctest::Approx(0.0 + 0.5 * 5.0 + 0.25 * 5.0));
  CHECK(row.variance == doctest::Approx(1.0 + 0.25 * 2.0 + 0.0625 * 2.0));
  CHECK(std::abs(mass_mean(row.probs, kSupport) - row.mean) < kSupport.delta());
}

TEST_CASE("local maxima counting") {
  using V = std::vector<double>;
  CHECK(oracle::count_local_maxima(V{0.1, 0.3, 0.1, 0.4, 0.1}) == 2);
  CHECK(oracle::count_local_maxima(V{0.2, 0.2, 0.2}) == 0);
  CHECK(oracle::count_local_maxima(V{0.5, 0.2, 0.3}) == 2);
  CHECK(oracle::count_local_maxima(V{0.1, 0.3, 0.3, 0.1}) == 1);
  CHECK(oracle::count_local_maxima(V{0.1, 0.3, 0.3, 0.4}) == 1);
  CHECK(oracle::count_local_maxima(V{1.0}) == 0);
}

TEST_CASE("enumeration matches a mixing layer by hand") {
  const dist::SupportSpec s(0.0, 4.0, 5);
  // Two coins on {0, 1}; weight 1 and 2, bias 0, identity.
  const std::vector<std::vector<double>> inputs{{0.5, 0.5, 0, 0, 0}, {0.5, 0.5, 0, 0, 0}};
  const oracle::ScalarLayer layer{{{1.0}, {2.0}}, {0.0}, dist::FunctionTag::identity};
  const auto out = oracle::brute_force_mix(inputs, {layer}, s);
  REQUIRE(out.size() == 1);
  const std::vector<double> expected{0.25, 0.25, 0.25, 0.25, 0.0};
  for (std::size_t k = 0; k < 5; ++k) CHECK(out[0][k] == doctest::Approx(expected[k]));

  std::vector<graph::Node> nodes;
  for (const auto& in : inputs) nodes.push_back(graph::constant(graph::Matrix::row_vector(in)));
  const auto mixed = mixers::dqmix_layer(
      nodes, mixers::constant_layer_params({{1.0}, {2.0}}, {0.0}), dist::FunctionTag::identity, s);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(mixed[0].value()(0, k) - out[0][k]) < 1e-12);
}

TEST_CASE("correlated reward demonstration") {
  const auto demo = oracle::correlated_reward_demo();
  const std::vector<double> dvdn{0.25, 0.0, 0.5, 0.0, 0.25};
  for (std::size_t k = 0; k < 5; ++k) CHECK(demo.dvdn.probs()[k] == doctest::Approx(dvdn[k]));
  CHECK(demo.truth.probs()[2] == 1.0);
  CHECK(std::abs(demo.kl_truth_to_dvdn - std::numbers::ln2) < 1e-12);
  CHECK(dist::expectation(demo.dvdn) == doctest::Approx(0.0));
  const auto j = demo.to_json();
  CHECK(j.contains("kl_truth_to_dvdn"));
}
