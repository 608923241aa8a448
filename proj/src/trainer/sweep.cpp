#include "catdist/trainer/sweep.hpp"

#include <ostream>

#include "catdist/trainer/trainer.hpp"

namespace catdist::train {

std::vector<SweepRow> sweep_atoms(const TrainConfig& base, Algorithm algo,
                                  const envs::MatrixGameSpec& game,
                                  std::span<const std::size_t> atom_counts) {
  std::vector<SweepRow> rows;
  for (const std::size_t m : atom_counts) {
    TrainConfig config = base;
    config.support = dist::SupportSpec(base.support.v_min(), base.support.v_max(), m);
    const auto result = train(config, algo, game);
    const FactorizedModel model(algo, game, config);
    for (const auto& r : evaluate(model, result.params, game).rows) {
      rows.push_back({m, r.joint, r.kl_to_oracle, r.cramer_to_oracle, r.mean, r.variance});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "m,joint_action,kl_to_oracle,cramer_to_oracle,mean,variance\n";
  for (const auto& r : rows) {
    std::string key;
    for (std::size_t i = 0; i < r.joint.size(); ++i) key += (i ? "_" : "") + std::to_string(r.joint[i]);
    out << r.m << ',' << key << ',' << format_double(r.kl_to_oracle) << ','
        << format_double(r.cramer_to_oracle) << ',' << format_double(r.mean) << ','
        << format_double(r.variance) << '\n';
  }
}

}  // namespace catdist::train
