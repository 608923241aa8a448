#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "catdist/checks/suites.hpp"
#include "catdist/cli/experiment.hpp"

namespace catdist::cli {

// Each command returns a process exit code and throws catdist::Error on bad input.

// Writes config.json, metrics.csv, checkpoint.bin, eval.json and histograms.json
// into the output directory.
int cmd_train(const ExperimentConfig& config, std::ostream& out);

// Writes eval.json and histograms.json for a saved checkpoint.
int cmd_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
             std::ostream& out);

// Prints one line per check; nonzero when any check fails.
int cmd_check(const std::string& suite, const checks::CheckOptions& options, std::ostream& out,
              const std::optional<std::filesystem::path>& report_path = std::nullopt);

// Writes atom_sweep.csv into the output directory.
int cmd_sweep_atoms(const ExperimentConfig& config, std::span<const std::size_t> atom_counts,
                    std::ostream& out);

// Prints the report and, when out_dir is set, writes demo_correlated.json there.
int cmd_demo_correlated(const std::optional<std::filesystem::path>& out_dir, std::ostream& out);

}  // namespace catdist::cli
