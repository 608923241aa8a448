#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "catdist/checks/suites.hpp"
#include "catdist/cli/commands.hpp"
#include "catdist/common/errors.hpp"
#include "catdist/trainer/sweep.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("catdist");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("CATDIST_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> algo;
};

void add_common(CLI::App& cmd, Common& common) {
  cmd.add_option("--config", common.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd.add_option("--seed", common.seed, "Override the experiment seed");
  cmd.add_option("--out", common.out, "Output directory");
  cmd.add_option("--algo", common.algo, "dvdn or dqmix")
      ->check(CLI::IsMember({"dvdn", "dqmix"}));
}

catdist::cli::ExperimentConfig resolve(const Common& common, std::optional<std::size_t> atoms) {
  auto config = common.config ? catdist::cli::load_experiment(*common.config)
                              : catdist::cli::ExperimentConfig{};
  catdist::cli::apply(config, {common.seed, common.out, common.algo, atoms});
  config.train.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Categorical distribution mixing for cooperative multi-agent RL"};
  app.require_subcommand(1);

  Common train_opts;
  std::optional<std::size_t> train_atoms;
  auto* train_cmd = app.add_subcommand("train", "Train on the matrix game and write all artifacts");
  add_common(*train_cmd, train_opts);
  train_cmd->add_option("--atoms", train_atoms, "Atom count override")->check(CLI::Range(2, 100000));

  Common eval_opts;
  std::string checkpoint;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against the oracle");
  add_common(*eval_cmd, eval_opts);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint.bin written by train")
      ->required()
      ->check(CLI::ExistingFile);

  std::string suite;
  std::string mutate;
  std::uint64_t check_seed = 0;
  std::optional<std::string> check_report;
  auto* check_cmd = app.add_subcommand("check", "Run a property suite");
  check_cmd->add_option("suite", suite, "Suite to run")
      ->required()
      ->check(CLI::IsMember(catdist::checks::suite_names()));
  check_cmd->add_option("--mutate", mutate, "Corrupt an operation to exercise the suite")
      ->check(CLI::IsMember({"convolution"}));
  check_cmd->add_option("--seed", check_seed, "Seed for randomized trials");
  check_cmd->add_option("--out", check_report, "Write the suite report as JSON to this file");

  Common sweep_opts;
  std::vector<std::size_t> sweep_atoms = catdist::train::kDefaultAtomCounts;
  auto* sweep_cmd = app.add_subcommand("sweep-atoms", "Train once per atom count and compare");
  add_common(*sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--atoms", sweep_atoms, "Comma-separated atom counts")
      ->delimiter(',')
      ->check(CLI::Range(2, 100000));

  std::optional<std::string> demo_out;
  auto* demo_cmd =
      app.add_subcommand("demo-correlated", "Anticorrelated rewards under independent summation");
  demo_cmd->add_option("--out", demo_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return catdist::cli::cmd_train(resolve(train_opts, train_atoms), std::cout);
    if (*eval_cmd) {
      return catdist::cli::cmd_eval(resolve(eval_opts, std::nullopt), checkpoint, std::cout);
    }
    if (*check_cmd) {
      catdist::checks::CheckOptions options;
      options.seed = check_seed;
      if (mutate == "convolution") options.convolve = &catdist::checks::corrupted_convolve;
      std::optional<std::filesystem::path> report;
      if (check_report) report = *check_report;
      return catdist::cli::cmd_check(suite, options, std::cout, report);
    }
    if (*sweep_cmd) {
      return catdist::cli::cmd_sweep_atoms(resolve(sweep_opts, std::nullopt), sweep_atoms,
                                           std::cout);
    }
    if (*demo_cmd) {
      std::optional<std::filesystem::path> dir;
      if (demo_out) dir = *demo_out;
      return catdist::cli::cmd_demo_correlated(dir, std::cout);
    }
  } catch (const catdist::Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 3;
  }
  return 0;
}
