#include <doctest.h>

#include <cmath>

#include "catdist/common/errors.hpp"
#include "catdist/envs/matrix_game.hpp"

using namespace catdist;
using envs::MatrixGameSpec;

TEST_CASE("default game payoff table") {
  const auto g = envs::default_matrix_game();
  CHECK(g.joint_action_count() == 4);
  CHECK(g.entry(std::vector<std::size_t>{0, 0}).mean() == 0.0);
  CHECK(g.entry(std::vector<std::size_t>{0, 1}).mean() == 3.0);
  CHECK(g.entry(std::vector<std::size_t>{1, 0}).mean() == 5.0);
  const auto& bimodal = g.entry(std::vector<std::size_t>{1, 1});
  CHECK(bimodal.mean() == doctest::Approx(4.5));
  // 0.5 * 2 + 0.5 * 2 + 0.25 * (8 - 1)^2
  CHECK(bimodal.variance() == doctest::Approx(14.25));
}

TEST_CASE("joint indices are row-major") {
  MatrixGameSpec g = envs::default_matrix_game();
  g.actions = 3;
  g.agents = 3;
  const std::vector<std::size_t> joint{2, 0, 1};
  CHECK(g.joint_index(joint) == 19);
  CHECK(g.joint_from_index(19) == envs::JointAction{2, 0, 1});
  CHECK(envs::joint_key(joint) == "2,0,1");
}

TEST_CASE("reward sampling moments") {
  const auto g = envs::default_matrix_game();
  Rng rng(11);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& spec = g.payoff[k];
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = spec.sample(rng);
      sum += r;
      sq += r * r;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double se = std::sqrt(spec.variance() / n);
    CHECK(std::abs(mean - spec.mean()) < 5.0 * se);
    CHECK(std::abs(var - spec.variance()) < 0.05 * spec.variance());
  }
}

TEST_CASE("observation and state layout") {
  MatrixGameSpec g = envs::default_matrix_game();
  g.horizon = 2;
  CHECK(envs::observation(g, 1, {}) == std::vector<double>{1, 0, 0, 0, 1});
  const std::vector<std::size_t> prev{1, 0};
  CHECK(envs::observation(g, 0, prev) == std::vector<double>{1, 0, 1, 1, 0});
  CHECK(envs::global_state(g, 1) == std::vector<double>{1, 0.5});

  envs::MatrixGame game(g, 3);
  CHECK_FALSE(game.done());
  const auto t0 = game.step(std::vector<std::size_t>{1, 1});
  CHECK_FALSE(t0.terminal);
  CHECK(t0.next_observations[1] == std::vector<double>{1, 0, 1, 0, 1});
  const auto t1 = game.step(std::vector<std::size_t>{0, 1});
  CHECK(t1.terminal);
  CHECK(game.done());
  CHECK_THROWS_AS(game.step(std::vector<std::size_t>{0, 0}), ConfigError);
  game.reset();
  CHECK(game.t() == 0);
}

TEST_CASE("seeded games replay identically") {
  envs::MatrixGame a(envs::default_matrix_game(), 42), b(envs::default_matrix_game(), 42);
  for (int i = 0; i < 50; ++i) {
    const std::vector<std::size_t> joint{static_cast<std::size_t>(i % 2), 1};
    CHECK(a.step(joint).reward == b.step(joint).reward);
    a.reset();
    b.reset();
  }
}

TEST_CASE("game json round trip and rejection") {
  MatrixGameSpec g = envs::default_matrix_game();
  g.horizon = 3;
  g.gamma = 0.9;
  CHECK(envs::matrix_game_from_json(envs::to_json(g)) == g);

  const auto partial = envs::matrix_game_from_json(
      nlohmann::json::parse(R"({"payoff": {"0,0": [{"mu": 2.0, "var": 0.5}]}})"));
  CHECK(partial.payoff[0].mean() == 2.0);
  CHECK(partial.payoff[3] == g.payoff[3]);

  CHECK_THROWS_AS(envs::matrix_game_from_json(nlohmann::json::parse(R"({"sides": 2})")),
                  ConfigError);
  CHECK_THROWS_AS(envs::matrix_game_from_json(
                      nlohmann::json::parse(R"({"payoff": {"0,0": [{"mu": 1, "sd": 1}]}})")),
                  ConfigError);
  CHECK_THROWS_AS(envs::matrix_game_from_json(nlohmann::json::parse(R"({"actions": 3})")),
                  ConfigError);
}
