#include "catdist/cli/commands.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "catdist/common/errors.hpp"
#include "catdist/oracle/oracle.hpp"
#include "catdist/trainer/sweep.hpp"
#include "catdist/trainer/trainer.hpp"

namespace catdist::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return path;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path.string());
  return file;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto file = open_out(path);
  file << j.dump(2) << '\n';
}

void write_reports(const fs::path& dir, const train::EvaluationReport& report) {
  write_json(dir / "eval.json", report.to_json());
  write_json(dir / "histograms.json", report.histogram_json());
}

void print_summary(std::ostream& out, const train::EvaluationReport& report) {
  for (const auto& r : report.rows) {
    out << envs::joint_key(r.joint) << ": mean " << r.mean << " (true " << r.true_mean
        << "), variance " << r.variance << " (true " << r.true_variance << "), KL "
        << r.kl_to_oracle << ", Cramer " << r.cramer_to_oracle << '\n';
  }
}

}  // namespace

int cmd_train(const ExperimentConfig& config, std::ostream& out) {
  const auto dir = prepare_dir(config.output_dir);
  spdlog::info("training {} for {} env steps, seed {}", train::to_string(config.algorithm),
               config.train.total_env_steps, config.seed);
  train::TrainHooks hooks;
  hooks.on_update = [](std::size_t update, double loss) {
    if (update % 1000 == 0) spdlog::debug("update {} loss {}", update, loss);
  };
  hooks.on_sync = [](std::size_t update) { spdlog::trace("target sync at update {}", update); };
  const auto result = train::train(config.train, config.algorithm, config.env, hooks);
  spdlog::info("finished after {} updates", result.updates);

  write_json(dir / "config.json", to_json(config));
  {
    auto csv = open_out(dir / "metrics.csv");
    train::write_metrics_csv(csv, config.env, result.metrics);
  }
  result.params.save_file((dir / "checkpoint.bin").string());
  const train::FactorizedModel model(config.algorithm, config.env, config.train);
  const auto report = train::evaluate(model, result.params, config.env);
  write_reports(dir, report);
  print_summary(out, report);
  out << "wrote " << dir.string() << '\n';
  return 0;
}

int cmd_eval(const ExperimentConfig& config, const fs::path& checkpoint, std::ostream& out) {
  if (!fs::exists(checkpoint)) throw ConfigError("checkpoint " + checkpoint.string() + " not found");
  const auto params = graph::ParameterSet::load_file(checkpoint.string());
  const train::FactorizedModel model(config.algorithm, config.env, config.train);
  // Shapes are checked by the forward pass; a mismatch surfaces as ShapeMismatch.
  const auto report = train::evaluate(model, params, config.env);
  const auto dir = prepare_dir(config.output_dir);
  write_reports(dir, report);
  print_summary(out, report);
  return 0;
}

int cmd_check(const std::string& suite, const checks::CheckOptions& options, std::ostream& out,
              const std::optional<fs::path>& report_path) {
  const auto report = checks::run_suite(suite, options);
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << report.suite << '.' << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
  out << (report.passed() ? "suite passed" : "suite FAILED") << '\n';
  if (report_path) write_json(*report_path, report.to_json());
  return report.passed() ? 0 : 1;
}

int cmd_sweep_atoms(const ExperimentConfig& config, std::span<const std::size_t> atom_counts,
                    std::ostream& out) {
  if (atom_counts.empty()) throw ConfigError("sweep needs at least one atom count");
  const auto dir = prepare_dir(config.output_dir);
  spdlog::info("atom sweep over {} settings, seed {}", atom_counts.size(), config.seed);
  const auto rows = train::sweep_atoms(config.train, config.algorithm, config.env, atom_counts);
  auto csv = open_out(dir / "atom_sweep.csv");
  train::write_sweep_csv(csv, rows);
  train::write_sweep_csv(out, rows);
  return 0;
}

int cmd_demo_correlated(const std::optional<fs::path>& out_dir, std::ostream& out) {
  const auto report = oracle::correlated_reward_demo().to_json();
  out << report.dump(2) << '\n';
  if (out_dir) write_json(prepare_dir(out_dir->string()) / "demo_correlated.json", report);
  return 0;
}

}  // namespace catdist::cli
