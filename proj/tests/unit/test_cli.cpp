#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "catdist/cli/commands.hpp"
#include "catdist/cli/experiment.hpp"
#include "catdist/common/errors.hpp"

using namespace catdist;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(CATDIST_SOURCE_DIR) / "configs";

nlohmann::json read(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> keys(const nlohmann::json& object) {
  std::set<std::string> out;
  for (const auto& [k, v] : object.items()) out.insert(k);
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("catdist_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

cli::ExperimentConfig tiny_experiment(const fs::path& out) {
  auto config = cli::load_experiment(kConfigs / "smoke.json");
  config.train.total_env_steps = 200;
  config.train.eval_every = 100;
  config.train.batch_episodes = 4;
  config.train.train_every = 2;
  config.train.agent_hidden = {8};
  config.output_dir = out.string();
  return config;
}

}  // namespace

TEST_CASE("shipped configs load") {
  for (const auto* name : {"matrix_game_dqmix.json", "matrix_game_dvdn.json", "smoke.json",
                           "repeated_game_dqmix.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(cli::load_experiment(kConfigs / name));
  }
  const auto dvdn = cli::load_experiment(kConfigs / "matrix_game_dvdn.json");
  CHECK(dvdn.algorithm == train::Algorithm::dvdn);
  CHECK(dvdn.env == envs::default_matrix_game());
  CHECK(cli::load_experiment(kConfigs / "repeated_game_dqmix.json").env.horizon == 2);
}

TEST_CASE("schema key sets match the parser") {
  const auto schema = read(kConfigs / "experiment.schema.json");
  CHECK(keys(schema["properties"]) ==
        std::set<std::string>{"algorithm", "env", "train", "output_dir", "seed"});
  const auto train_keys = keys(schema["$defs"]["train"]["properties"]);
  train::TrainConfig full;
  full.gamma = 0.9;
  auto emitted = keys(train::to_json(full));
  emitted.erase("seed");
  CHECK(train_keys == emitted);
  CHECK(keys(schema["$defs"]["game"]["properties"]) == keys(envs::to_json(envs::default_matrix_game())));
}

TEST_CASE("bad experiment configs are rejected") {
  CHECK_THROWS_AS(cli::experiment_from_json(nlohmann::json::parse(R"({"algo": "dqmix"})")),
                  ConfigError);
  CHECK_THROWS_AS(cli::experiment_from_json(nlohmann::json::parse(R"({"train": {"seed": 3}})")),
                  ConfigError);
  CHECK_THROWS_AS(cli::experiment_from_json(nlohmann::json::parse(R"({"algorithm": "vdn"})")),
                  ConfigError);
  CHECK_THROWS_AS(cli::experiment_from_json(nlohmann::json::parse(R"({"seed": "one"})")),
                  ConfigError);
  CHECK_THROWS_AS(cli::load_experiment(kConfigs / "missing.json"), ConfigError);
}

TEST_CASE("overrides") {
  auto config = cli::load_experiment(kConfigs / "smoke.json");
  cli::apply(config, {7, "elsewhere", "dvdn", 25});
  CHECK(config.seed == 7);
  CHECK(config.train.seed == 7);
  CHECK(config.output_dir == "elsewhere");
  CHECK(config.algorithm == train::Algorithm::dvdn);
  CHECK(config.train.support == dist::SupportSpec(-10.0, 20.0, 25));
  const auto resolved = cli::to_json(config);
  CHECK(resolved["env"].is_object());
  CHECK_FALSE(resolved["train"].contains("seed"));
  CHECK(cli::to_json(cli::experiment_from_json(resolved)) == resolved);
}

TEST_CASE("train writes every artifact and reruns are byte-identical") {
  const auto dir_a = scratch_dir("a"), dir_b = scratch_dir("b");
  std::ostringstream log;
  CHECK(cli::cmd_train(tiny_experiment(dir_a), log) == 0);
  CHECK(cli::cmd_train(tiny_experiment(dir_b), log) == 0);
  for (const auto* name :
       {"config.json", "metrics.csv", "checkpoint.bin", "eval.json", "histograms.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_a / name));
    if (std::string(name) != "config.json") CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }

  const auto dir_c = scratch_dir("c");
  auto eval_config = tiny_experiment(dir_c);
  CHECK(cli::cmd_eval(eval_config, dir_a / "checkpoint.bin", log) == 0);
  CHECK(slurp(dir_c / "eval.json") == slurp(dir_a / "eval.json"));
  CHECK_THROWS_AS(cli::cmd_eval(eval_config, dir_a / "nope.bin", log), ConfigError);
  eval_config.train.support = dist::SupportSpec(-10.0, 20.0, 11);
  CHECK_THROWS_AS(cli::cmd_eval(eval_config, dir_a / "checkpoint.bin", log), Error);

  const auto reloaded = cli::load_experiment(dir_a / "config.json");
  CHECK(cli::to_json(reloaded) == read(dir_a / "config.json"));
  for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);
}

TEST_CASE("check and demo commands") {
  std::ostringstream out;
  CHECK_THROWS_AS(cli::cmd_check("everything", {}, out), ConfigError);
  const auto dir = scratch_dir("demo");
  CHECK(cli::cmd_demo_correlated(dir, out) == 0);
  const auto demo = read(dir / "demo_correlated.json");
  CHECK(demo["kl_truth_to_dvdn"].get<double>() == doctest::Approx(0.6931471805599453));
  fs::remove_all(dir);
}
