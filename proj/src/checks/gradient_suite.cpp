#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "catdist/checks/suites.hpp"
#include "catdist/envs/matrix_game.hpp"
#include "catdist/graph/ops.hpp"
#include "catdist/trainer/model.hpp"
#include "catdist/trainer/trainer.hpp"
#include "random_inputs.hpp"

namespace catdist::checks {

using graph::Matrix;
using graph::Node;

namespace {

constexpr double kStep = 1e-5;
constexpr double kRelTolerance = 1e-4;
// Gradients below this magnitude are compared absolutely at kRelTolerance * kFloor.
constexpr double kFloor = 1e-5;
constexpr std::size_t kGraphsPerOp = 100;

struct FdStats {
  std::size_t coordinates = 0;
  std::size_t kinks = 0;  // stencil straddles a non-differentiable point
  std::size_t failures = 0;
  double worst = 0.0;
  std::string first_failure;
};

// Compares reverse-mode gradients of build() against central differences for
// every coordinate of every leaf in `leaves`.
void finite_difference(const std::vector<Node>& leaves, const std::function<Node()>& build,
                       FdStats& stats) {
  for (const auto& leaf : leaves) std::fill(leaf.get()->grad.data().begin(),
                                            leaf.get()->grad.data().end(), 0.0);
  graph::backward(build());
  graph::NoGradGuard no_grad;
  const auto eval = [&] { return build().value()(0, 0); };
  const double base = eval();
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    Node leaf = leaves[l];
    auto values = leaf.mutable_value().data();
    const auto grads = leaf.grad().data();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + kStep;
      const double up = eval();
      values[k] = saved - kStep;
      const double down = eval();
      values[k] = saved;
      const double central = (up - down) / (2.0 * kStep);
      const double analytic = grads[k];
      const double gap = std::abs(analytic - central);
      const double err = gap / std::max({std::abs(analytic), std::abs(central), kFloor});
      ++stats.coordinates;
      if (err < kRelTolerance) {
        stats.worst = std::max(stats.worst, err);
        continue;
      }
      const double one_sided_gap = std::abs((up - base) / kStep - (base - down) / kStep);
      if (one_sided_gap >= gap) {
        ++stats.kinks;
        continue;
      }
      if (stats.failures++ == 0) {
        std::ostringstream os;
        os << "leaf " << l << " coord " << k << ": analytic " << analytic << " vs numeric "
           << central;
        stats.first_failure = os.str();
      }
    }
  }
}

CheckResult summarize(const std::string& name, const FdStats& stats) {
  std::ostringstream os;
  os << stats.coordinates << " coordinates, worst relative error " << stats.worst << ", "
     << stats.kinks << " kink stencils skipped, " << stats.failures << " failures";
  if (stats.failures > 0) os << "; first: " << stats.first_failure;
  // Kinks are measure-zero events; a systematic error would show up broadly.
  const bool ok = stats.failures == 0 && stats.coordinates > 0 &&
                  stats.kinks * 100 <= stats.coordinates;
  return {name, ok, os.str()};
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

// Entries with magnitude in [0.1, 2] so activation kinks at 0 stay out of reach.
Matrix away_from_zero(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 2.0);
  return m;
}

// Sorted atoms per row, none within 1e-3 spacings of a target atom.
Matrix atoms_off_grid(std::size_t rows, std::size_t cols, const dist::SupportSpec& target,
                      Rng& rng) {
  Matrix m(rows, cols);
  const double lo = target.v_min() - 2.0 * target.delta();
  const double hi = target.v_max() + 2.0 * target.delta();
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = m.row(r);
    for (auto& v : row) {
      double pos = 0.0;
      do {
        v = rng.uniform(lo, hi);
        pos = (v - target.v_min()) / target.delta();
      } while (std::abs(pos - std::round(pos)) < 1e-3);
    }
    std::sort(row.begin(), row.end());
  }
  return m;
}

// Scalar probe: mean of op output weighted by a fixed random matrix.
Node probe(const Node& out, const Matrix& weights) {
  return graph::mean_all(graph::mul(out, graph::constant(weights)));
}

using OpCase = std::function<void(Rng&, FdStats&)>;

std::vector<std::pair<std::string, OpCase>> op_cases() {
  std::vector<std::pair<std::string, OpCase>> cases;
  const auto dims = [](Rng& rng) { return 1 + rng.uniform_index(4); };

  cases.emplace_back("dense", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng), in = dims(rng), out = dims(rng);
    const auto x = graph::variable(random_matrix(b, in, rng));
    const auto w = graph::variable(random_matrix(in, out, rng));
    const auto bias = graph::variable(random_matrix(1, out, rng));
    const auto r = random_matrix(b, out, rng);
    finite_difference({x, w, bias}, [&] { return probe(graph::dense(x, w, bias), r); }, stats);
  });
  for (const auto kind : {graph::Activation::identity, graph::Activation::relu,
                          graph::Activation::elu, graph::Activation::abs,
                          graph::Activation::softmax}) {
    static const char* names[] = {"identity", "relu", "elu", "abs", "softmax"};
    cases.emplace_back(std::string("activation_") + names[static_cast<int>(kind)],
                       [dims, kind](Rng& rng, FdStats& stats) {
                         const std::size_t b = dims(rng), n = 1 + dims(rng);
                         const auto x = graph::variable(away_from_zero(b, n, rng));
                         const auto r = random_matrix(b, n, rng);
                         finite_difference(
                             {x}, [&] { return probe(graph::activation(x, kind), r); }, stats);
                       });
  }
  cases.emplace_back("add_broadcast", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng), n = dims(rng);
    const auto x = graph::variable(random_matrix(b, n, rng));
    const auto y = graph::variable(random_matrix(rng.uniform() < 0.5 ? 1 : b,
                                                 rng.uniform() < 0.5 ? 1 : n, rng));
    const auto r = random_matrix(b, n, rng);
    finite_difference({x, y}, [&] { return probe(graph::add(x, y), r); }, stats);
  });
  cases.emplace_back("mul_broadcast", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng), n = dims(rng);
    const auto x = graph::variable(random_matrix(b, n, rng));
    const auto y = graph::variable(random_matrix(rng.uniform() < 0.5 ? 1 : b,
                                                 rng.uniform() < 0.5 ? 1 : n, rng));
    const auto r = random_matrix(b, n, rng);
    finite_difference({x, y}, [&] { return probe(graph::mul(x, y), r); }, stats);
  });
  cases.emplace_back("scale", [dims](Rng& rng, FdStats& stats) {
    const auto x = graph::variable(random_matrix(dims(rng), dims(rng), rng));
    const double c = rng.uniform(-3.0, 3.0);
    const auto r = random_matrix(x.rows(), x.cols(), rng);
    finite_difference({x}, [&] { return probe(graph::scale(x, c), r); }, stats);
  });
  cases.emplace_back("mean_all", [dims](Rng& rng, FdStats& stats) {
    const auto x = graph::variable(random_matrix(dims(rng), dims(rng), rng));
    finite_difference({x}, [&] { return graph::mean_all(x); }, stats);
  });
  cases.emplace_back("slice_cols_rows", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = 1 + dims(rng), n = 1 + dims(rng);
    const auto x = graph::variable(random_matrix(b, n, rng));
    const std::size_t c0 = rng.uniform_index(n), r0 = rng.uniform_index(b);
    const std::size_t cn = 1 + rng.uniform_index(n - c0), rn = 1 + rng.uniform_index(b - r0);
    const auto r = random_matrix(rn, cn, rng);
    finite_difference(
        {x}, [&] { return probe(graph::slice_rows(graph::slice_cols(x, c0, cn), r0, rn), r); },
        stats);
  });
  cases.emplace_back("select_blocks", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng), blocks = 1 + dims(rng), width = dims(rng);
    const auto x = graph::variable(random_matrix(b, blocks * width, rng));
    std::vector<std::size_t> idx(b);
    for (auto& i : idx) i = rng.uniform_index(blocks);
    const auto r = random_matrix(b, width, rng);
    finite_difference({x}, [&] { return probe(graph::select_blocks(x, idx, width), r); }, stats);
  });
  cases.emplace_back("concat_rows", [dims](Rng& rng, FdStats& stats) {
    const std::size_t n = dims(rng);
    const auto x = graph::variable(random_matrix(dims(rng), n, rng));
    const auto y = graph::variable(random_matrix(dims(rng), n, rng));
    const auto r = random_matrix(x.rows() + y.rows(), n, rng);
    finite_difference(
        {x, y}, [&] { return probe(graph::concat_rows(std::vector<Node>{x, y}), r); }, stats);
  });
  cases.emplace_back("project", [dims](Rng& rng, FdStats& stats) {
    const auto target = detail::random_support(rng, 2, 8);
    const std::size_t b = dims(rng), n = 1 + dims(rng);
    const bool shared = rng.uniform() < 0.5;
    const auto p = graph::variable(random_matrix(b, n, rng, 0.0, 1.0));
    const auto a = graph::variable(atoms_off_grid(shared ? 1 : b, n, target, rng));
    const auto r = random_matrix(b, target.m(), rng);
    finite_difference({p, a}, [&] { return probe(graph::project(p, a, target), r); }, stats);
  });
  cases.emplace_back("convolve", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng);
    const auto x = graph::variable(random_matrix(b, 1 + dims(rng), rng, 0.0, 1.0));
    const auto y = graph::variable(random_matrix(b, 1 + dims(rng), rng, 0.0, 1.0));
    const auto r = random_matrix(b, x.cols() + y.cols() - 1, rng);
    finite_difference({x, y}, [&] { return probe(graph::convolve(x, y), r); }, stats);
  });
  cases.emplace_back("cross_entropy", [dims](Rng& rng, FdStats& stats) {
    const std::size_t b = dims(rng), n = 1 + dims(rng);
    Matrix t(b, n);
    for (std::size_t r = 0; r < b; ++r) {
      const auto p = detail::random_probs(n, rng);
      std::copy(p.begin(), p.end(), t.row(r).begin());
    }
    const auto q = graph::variable(random_matrix(b, n, rng, 0.05, 1.0));
    const auto logits = graph::variable(random_matrix(b, n, rng, -2.0, 2.0));
    finite_difference({q}, [&] { return graph::cross_entropy(t, q); }, stats);
    finite_difference(
        {logits},
        [&] { return graph::cross_entropy(t, graph::activation(logits, graph::Activation::softmax)); },
        stats);
  });
  return cases;
}

std::vector<Node> parameter_leaves(const graph::ParameterSet& params) {
  std::vector<Node> leaves;
  for (const auto& [name, node] : params.entries()) leaves.push_back(node);
  return leaves;
}

// One stored transition from a fixed joint action.
envs::Transition sample_transition(const envs::MatrixGameSpec& game, Rng& rng) {
  envs::JointAction joint(game.agents);
  for (auto& a : joint) a = rng.uniform_index(game.actions);
  return envs::step(game, 0, {}, joint, rng);
}

CheckResult full_loss_case(train::Algorithm algo, std::size_t horizon, Rng& rng) {
  auto game = envs::default_matrix_game();
  game.horizon = horizon;
  train::TrainConfig config;
  const train::FactorizedModel model(algo, game, config);
  graph::ParameterSet online;
  graph::ParameterSet target;
  model.init_parameters(online, rng);
  model.init_parameters(target, rng);
  const auto tr = sample_transition(game, rng);
  const envs::Transition* batch[] = {&tr};
  FdStats stats;
  finite_difference(
      parameter_leaves(online),
      [&] { return train::loss_batch(batch, model, online, target, game.gamma); }, stats);
  const std::string name = std::string("loss_") + std::string(train::to_string(algo)) +
                           (tr.terminal ? "_terminal" : "_bootstrapped");
  return summarize(name, stats);
}

}  // namespace

SuiteReport run_gradient_suite(const CheckOptions& options) {
  Rng rng(options.seed);
  SuiteReport report{"gradients", {}};
  for (const auto& [name, run] : op_cases()) {
    FdStats stats;
    for (std::size_t g = 0; g < kGraphsPerOp; ++g) run(rng, stats);
    report.checks.push_back(summarize("op_" + name, stats));
  }
  for (const auto algo : {train::Algorithm::dvdn, train::Algorithm::dqmix}) {
    for (const std::size_t horizon : {1, 2}) {
      report.checks.push_back(full_loss_case(algo, horizon, rng));
    }
  }

  {
    auto game = envs::default_matrix_game();
    const train::FactorizedModel model(train::Algorithm::dqmix, game, train::TrainConfig{});
    graph::ParameterSet params;
    model.init_parameters(params, rng);
    const auto tr = sample_transition(game, rng);
    const envs::Transition* batch[] = {&tr};
    std::vector<std::vector<double>> runs;
    for (int k = 0; k < 2; ++k) {
      params.zero_grad();
      graph::backward(train::loss_batch(batch, model, params, params, game.gamma));
      runs.emplace_back();
      for (const auto& [name, node] : params.entries()) {
        runs.back().insert(runs.back().end(), node.grad().data().begin(), node.grad().data().end());
      }
    }
    report.checks.push_back({"backward_deterministic", runs[0] == runs[1],
                             std::to_string(runs[0].size()) + " gradient entries compared"});
  }
  return report;
}

}  // namespace catdist::checks
