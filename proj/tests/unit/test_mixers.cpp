#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "catdist/common/errors.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/mixers/mixers.hpp"

using namespace catdist;
using graph::Matrix;

namespace {

const dist::SupportSpec kSupport(-4.0, 4.0, 9);

Matrix point_mass(double value) {
  Matrix m(1, kSupport.m());
  m(0, static_cast<std::size_t>(std::lround((value - kSupport.v_min()) / kSupport.delta()))) = 1.0;
  return m;
}

std::vector<double> random_probs(std::size_t m, Rng& rng) {
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& v : p) total += v = rng.uniform();
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("dvdn adds point masses") {
  const std::vector<graph::Node> in{graph::constant(point_mass(1.0)),
                                    graph::constant(point_mass(-3.0))};
  const auto out = mixers::dvdn_mix(in, kSupport);
  CHECK(out.value() == point_mass(-2.0));
}

TEST_CASE("dvdn reports clipped mass") {
  const std::vector<graph::Node> in{graph::constant(point_mass(3.0)),
                                    graph::constant(point_mass(3.0))};
  mixers::MixStats stats;
  const auto out = mixers::dvdn_mix(in, kSupport, &stats);
  CHECK(out.value() == point_mass(4.0));
  CHECK(stats.rate() > 0.0);
}

TEST_CASE("unit weights and identity reduce a layer to dvdn") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<graph::Node> in;
    for (int i = 0; i < 3; ++i) in.push_back(graph::constant(Matrix::row_vector(random_probs(9, rng))));
    const auto params = mixers::constant_layer_params({{1.0}, {1.0}, {1.0}}, {0.0});
    const auto layer = mixers::dqmix_layer(in, params, dist::FunctionTag::identity, kSupport);
    REQUIRE(layer.size() == 1);
    const auto dvdn = mixers::dvdn_mix(in, kSupport);
    for (std::size_t k = 0; k < kSupport.m(); ++k) {
      CHECK(std::abs(layer[0].value()(0, k) - dvdn.value()(0, k)) < 1e-12);
    }
  }
}

TEST_CASE("layer bias shifts and function maps point masses") {
  const std::vector<graph::Node> in{graph::constant(point_mass(-1.0)),
                                    graph::constant(point_mass(-2.0))};
  const auto params = mixers::constant_layer_params({{1.0, 1.0}, {1.0, 0.5}}, {1.0, 0.0});
  const auto out = mixers::dqmix_layer(in, params, dist::FunctionTag::relu, kSupport);
  REQUIRE(out.size() == 2);
  CHECK(out[0].value() == point_mass(0.0));  // relu(-3 + 1)
  CHECK(out[1].value() == point_mass(0.0));  // relu(-1 - 1)
  const auto ident = mixers::dqmix_layer(in, params, dist::FunctionTag::identity, kSupport);
  CHECK(ident[0].value() == point_mass(-2.0));
  CHECK(ident[1].value() == point_mass(-2.0));
}

TEST_CASE("layer rejects negative weights and foreign supports") {
  const std::vector<graph::Node> in{graph::constant(point_mass(0.0))};
  CHECK_THROWS_AS(mixers::dqmix_layer(in, mixers::constant_layer_params({{-0.5}}, {0.0}),
                                      dist::FunctionTag::identity, kSupport),
                  std::invalid_argument);
  const std::vector<graph::Node> wrong{graph::constant(Matrix(1, 5, 0.2))};
  CHECK_THROWS_AS(mixers::dqmix_layer(wrong, mixers::constant_layer_params({{1.0}}, {0.0}),
                                      dist::FunctionTag::identity, kSupport),
                  ShapeMismatch);
}

TEST_CASE("hypernetwork weights are non-negative") {
  mixers::DqmixConfig config;
  config.support = kSupport;
  const mixers::DqmixMixer mixer(config);
  graph::ParameterSet params;
  Rng rng(7);
  mixer.init_parameters(params, rng);
  Matrix states(10000, 2);
  for (auto& v : states.data()) v = rng.uniform(-5.0, 5.0);
  for (std::size_t layer = 0; layer < 2; ++layer) {
    const auto p = mixer.hypernet_forward(graph::constant(states), layer, params);
    CHECK(p.n_in == (layer == 0 ? 2 : config.hidden));
    CHECK(p.n_out == (layer == 0 ? config.hidden : 1));
    for (double w : p.weights.value().data()) CHECK(w >= 0.0);
  }
}

TEST_CASE("zero hypernetwork gives zero weights and biases") {
  mixers::DqmixConfig config;
  config.support = kSupport;
  const mixers::DqmixMixer mixer(config);
  graph::ParameterSet params;
  Rng rng(8);
  mixer.init_parameters(params, rng);
  for (const auto& [name, node] : params.entries()) node.get()->value.fill(0.0);
  const auto state = graph::constant(Matrix(1, 2, {1.0, 0.5}));
  for (std::size_t layer = 0; layer < 2; ++layer) {
    const auto p = mixer.hypernet_forward(state, layer, params);
    for (double w : p.weights.value().data()) CHECK(w == 0.0);
    for (double b : p.biases.value().data()) CHECK(b == 0.0);
  }
  // All weights zero: the global return is a point mass at zero.
  const std::vector<graph::Node> in{graph::constant(point_mass(2.0)),
                                    graph::constant(point_mass(-1.0))};
  CHECK(mixer.mix(in, state, params).value() == point_mass(0.0));
}

TEST_CASE("mixer output rows are distributions") {
  mixers::DqmixConfig config;
  config.support = kSupport;
  const mixers::DqmixMixer mixer(config);
  graph::ParameterSet params;
  Rng rng(9);
  mixer.init_parameters(params, rng);
  Matrix a(4, 9), b(4, 9), s(4, 2);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto pa = random_probs(9, rng), pb = random_probs(9, rng);
    for (std::size_t k = 0; k < 9; ++k) a(r, k) = pa[k], b(r, k) = pb[k];
    s(r, 0) = 1.0;
    s(r, 1) = 0.25 * static_cast<double>(r);
  }
  const std::vector<graph::Node> in{graph::constant(a), graph::constant(b)};
  const auto out = mixer.mix(in, graph::constant(s), params);
  REQUIRE(out.rows() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    double total = 0.0;
    for (double p : out.value().row(r)) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}
