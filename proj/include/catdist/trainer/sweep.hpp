#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "catdist/envs/matrix_game.hpp"
#include "catdist/trainer/config.hpp"

namespace catdist::train {

inline const std::vector<std::size_t> kDefaultAtomCounts{5, 11, 25, 51, 75};

struct SweepRow {
  std::size_t m = 0;
  envs::JointAction joint;
  double kl_to_oracle = 0.0;
  double cramer_to_oracle = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

// Trains once per atom count on the same seed and support range, keeping
// every other setting, and reports the final comparison with the oracle.
std::vector<SweepRow> sweep_atoms(const TrainConfig& base, Algorithm algo,
                                  const envs::MatrixGameSpec& game,
                                  std::span<const std::size_t> atom_counts);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace catdist::train
