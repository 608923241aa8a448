#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "catdist/common/errors.hpp"
#include "catdist/common/rng.hpp"
#include "catdist/distcore/operations.hpp"
#include "catdist/distcore/serialization.hpp"

using namespace catdist;
using dist::CategoricalDistribution;
using dist::SupportSpec;

namespace {

void check_dist(const CategoricalDistribution& x, const std::vector<double>& atoms,
                const std::vector<double>& probs, double tol = 1e-12) {
  REQUIRE(x.size() == atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    CHECK(std::abs(x.atoms()[k] - atoms[k]) <= tol * std::max(1.0, std::abs(atoms[k])));
    CHECK(std::abs(x.probs()[k] - probs[k]) <= tol);
  }
}

CategoricalDistribution coin(double lo, double hi) { return {{lo, hi}, {0.5, 0.5}}; }

std::vector<double> random_probs(std::size_t m, Rng& rng) {
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& v : p) total += v = rng.uniform() + 1e-3;
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("support grid reconstructs atoms from its fields") {
  const SupportSpec s(-10.0, 20.0, 51);
  CHECK(s.delta() == doctest::Approx(0.6));
  CHECK(s.atom(0) == -10.0);
  CHECK(s.atom(50) == 20.0);
  CHECK(s.atom(25) == doctest::Approx(5.0));
  CHECK(s.atoms().size() == 51);
  CHECK_THROWS_AS(SupportSpec(1.0, 1.0, 5), InvalidSupport);
  CHECK_THROWS_AS(SupportSpec(0.0, 1.0, 1), InvalidSupport);
  CHECK_THROWS_AS(SupportSpec(0.0, std::nan(""), 3), InvalidSupport);
}

TEST_CASE("distribution validation") {
  const SupportSpec s(0.0, 2.0, 3);
  CHECK_NOTHROW(CategoricalDistribution(s, {0.2, 0.3, 0.5}));
  CHECK_THROWS_AS(CategoricalDistribution(s, {0.2, 0.3, 0.6}), InvalidDistribution);
  CHECK_THROWS_AS(CategoricalDistribution(s, {-0.1, 0.6, 0.5}), InvalidDistribution);
  CHECK_THROWS_AS(CategoricalDistribution(s, {0.5, 0.5}), InvalidDistribution);
  CHECK_THROWS_AS(CategoricalDistribution({1.0, 0.0}, {0.5, 0.5}), InvalidDistribution);
  CHECK(CategoricalDistribution(std::vector<double>{0.0, 1.0, 2.0}, {0.2, 0.3, 0.5}).is_uniform());
  CHECK_FALSE(CategoricalDistribution(std::vector<double>{0.0, 1.0, 3.0}, {0.2, 0.3, 0.5}).is_uniform());
}

TEST_CASE("weighting scales atoms") {
  check_dist(dist::weighting(coin(-1, 1), 2.0), {-2, 2}, {0.5, 0.5});
  const CategoricalDistribution x(std::vector<double>{-1.0, 0.0, 3.0}, {0.2, 0.3, 0.5});
  check_dist(dist::weighting(x, 1.0), {-1, 0, 3}, {0.2, 0.3, 0.5});
  check_dist(dist::weighting(x, -1.0), {-3, 0, 1}, {0.5, 0.3, 0.2});
  check_dist(dist::weighting(coin(-1, 1), 0.0), {0.0}, {1.0});
}

TEST_CASE("bias shifts atoms") {
  check_dist(dist::bias(coin(0, 2), 1.0), {1, 3}, {0.5, 0.5});
  check_dist(dist::bias(coin(0, 2), 0.0), {0, 2}, {0.5, 0.5});
  check_dist(dist::bias(CategoricalDistribution::point_mass(-10.0), 10.0), {0}, {1});
}

TEST_CASE("convolution of small cases") {
  check_dist(dist::convolve(coin(-1, 1), CategoricalDistribution::point_mass(1.0)), {0, 2},
             {0.5, 0.5});
  // Two independent +-1 coins on a grid of spacing 1.
  const CategoricalDistribution c(std::vector<double>{-1.0, 0.0, 1.0}, {0.5, 0.0, 0.5});
  check_dist(dist::convolve(c, c), {-2, -1, 0, 1, 2}, {0.25, 0, 0.5, 0, 0.25});
  const CategoricalDistribution x(std::vector<double>{1.0, 2.0, 3.0}, {0.1, 0.6, 0.3});
  check_dist(dist::convolve(x, CategoricalDistribution::point_mass(0.0)), {1, 2, 3},
             {0.1, 0.6, 0.3});
  CHECK(dist::convolve(x, c).size() == 5);
  CHECK_THROWS_AS(dist::convolve(x, CategoricalDistribution({0.0, 2.0}, {0.5, 0.5})),
                  SpacingMismatch);
  CHECK_THROWS_AS(dist::convolve(x, CategoricalDistribution(std::vector<double>{0.0, 1.0, 3.0}, {0.2, 0.3, 0.5})),
                  SpacingMismatch);
}

TEST_CASE("convolution agrees with a value-keyed double loop") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m1 = 2 + rng.uniform_index(6), m2 = 2 + rng.uniform_index(6);
    const double d = rng.uniform(0.2, 1.5);
    const SupportSpec s1(-1.0, -1.0 + d * static_cast<double>(m1 - 1), m1);
    const SupportSpec s2(0.5, 0.5 + d * static_cast<double>(m2 - 1), m2);
    const CategoricalDistribution x1(s1, random_probs(m1, rng)), x2(s2, random_probs(m2, rng));
    const auto z = dist::convolve(x1, x2);
    for (std::size_t r = 0; r < z.size(); ++r) {
      double mass = 0.0;
      for (std::size_t i = 0; i < m1; ++i) {
        for (std::size_t k = 0; k < m2; ++k) {
          if (std::abs(x1.atoms()[i] + x2.atoms()[k] - z.atoms()[r]) < d / 2) {
            mass += x1.probs()[i] * x2.probs()[k];
          }
        }
      }
      CHECK(std::abs(z.probs()[r] - mass) < 1e-12);
    }
  }
}

TEST_CASE("projection splits, clips and keeps grid points") {
  const SupportSpec grid(0.0, 3.0, 4);
  check_dist(dist::project(CategoricalDistribution::point_mass(1.5), grid), {0, 1, 2, 3},
             {0, 0.5, 0.5, 0});
  check_dist(dist::project(CategoricalDistribution::point_mass(1.25), grid), {0, 1, 2, 3},
             {0, 0.75, 0.25, 0});
  const CategoricalDistribution on_grid(grid, {0.1, 0.2, 0.3, 0.4});
  const auto same = dist::project(on_grid, grid);
  for (std::size_t k = 0; k < 4; ++k) CHECK(same.probs()[k] == on_grid.probs()[k]);
  const SupportSpec big(-10.0, 20.0, 51);
  const auto clipped = dist::project(CategoricalDistribution::point_mass(25.0), big);
  CHECK(clipped.probs()[50] == 1.0);
  CHECK(dist::clipped_mass(CategoricalDistribution::point_mass(25.0), big) == 1.0);
  // Clipping keeps the mass but not the mean.
  const auto c = dist::project(CategoricalDistribution({-12.0, 0.0}, {0.5, 0.5}), big);
  CHECK(dist::expectation(c) == doctest::Approx(-5.0));
}

TEST_CASE("projection keeps the mean of covered distributions") {
  Rng rng(11);
  const SupportSpec t(-3.0, 4.0, 8);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> atoms(1 + rng.uniform_index(9));
    for (auto& a : atoms) a = rng.uniform(-3.0, 4.0);
    std::sort(atoms.begin(), atoms.end());
    const CategoricalDistribution x(atoms, random_probs(atoms.size(), rng));
    CHECK(std::abs(dist::expectation(dist::project(x, t)) - dist::expectation(x)) < 1e-9);
  }
}

TEST_CASE("relu of the two toy sums") {
  const dist::MonotoneFunction relu(dist::FunctionTag::relu);
  const auto one = CategoricalDistribution::point_mass(1.0);
  const auto case1 = dist::apply_function(dist::convolve(coin(-1, 1), one), relu);
  check_dist(case1, {0, 2}, {0.5, 0.5});
  CHECK(dist::expectation(case1) == doctest::Approx(1.0));
  const auto case2 = dist::apply_function(dist::convolve(coin(-2, 2), one), relu);
  check_dist(case2, {0, 3}, {0.5, 0.5});
  CHECK(dist::expectation(case2) == doctest::Approx(1.5));
  check_dist(dist::apply_function(coin(-1, 3), relu), {0, 3}, {0.5, 0.5});
}

TEST_CASE("function registry") {
  CHECK(dist::MonotoneFunction::from_name("elu")(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(dist::MonotoneFunction::from_name("identity")(-4.0) == -4.0);
  CHECK_THROWS_AS(dist::MonotoneFunction::from_name("abs"), NonMonotoneFunction);
  CHECK_THROWS_AS(dist::MonotoneFunction::from_name("tanhh"), NonMonotoneFunction);
  CHECK_THROWS_AS(dist::MonotoneFunction::custom("square", [](double x) { return x * x; }),
                  NonMonotoneFunction);
  CHECK_NOTHROW(dist::MonotoneFunction::custom("cube", [](double x) { return x * x * x; }));
}

TEST_CASE("moments") {
  CHECK(dist::expectation(coin(-1, 1)) == 0.0);
  CHECK(dist::expectation(CategoricalDistribution::point_mass(1.0)) == 1.0);
  CHECK(dist::expectation(coin(0, 3)) == 1.5);
  CHECK(dist::variance(coin(-1, 1)) == 1.0);
  CHECK(dist::variance(CategoricalDistribution::point_mass(4.0)) == 0.0);
  CHECK(dist::variance(coin(0, 3)) == 2.25);
}

TEST_CASE("divergences") {
  const SupportSpec two(0.0, 1.0, 2);
  const CategoricalDistribution first(two, {1.0, 0.0}), uniform(two, {0.5, 0.5});
  CHECK(dist::kl_divergence(first, uniform) == doctest::Approx(std::numbers::ln2));
  CHECK(dist::kl_divergence(uniform, uniform) == 0.0);
  CHECK(dist::kl_divergence(uniform, first) ==
        doctest::Approx(0.5 * std::log(0.5) + 0.5 * std::log(0.5 / 1e-12)));
  CHECK_THROWS_AS(dist::kl_divergence(first, CategoricalDistribution(SupportSpec(0, 2, 2), {1, 0})),
                  SupportMismatch);

  const SupportSpec grid(0.0, 1.5, 4);
  const CategoricalDistribution a(grid, {0, 1, 0, 0}), b(grid, {0, 0, 1, 0});
  CHECK(dist::cramer_distance(a, a) == 0.0);
  CHECK(dist::cramer_distance(a, b) == doctest::Approx(std::sqrt(0.5)));

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const SupportSpec s(-2.0, 5.0, 9);
    const CategoricalDistribution p(s, random_probs(9, rng)), q(s, random_probs(9, rng));
    double kl = 0.0, cram = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
      kl += p.probs()[j] * std::log(p.probs()[j] / q.probs()[j]);
      double fp = 0.0, fq = 0.0;
      for (std::size_t i = 0; i <= j; ++i) {
        fp += p.probs()[i];
        fq += q.probs()[i];
      }
      if (j + 1 < 9) cram += (fp - fq) * (fp - fq) * s.delta();
    }
    CHECK(dist::kl_divergence(p, q) == doctest::Approx(kl).epsilon(1e-12));
    CHECK(dist::cramer_distance(p, q) == doctest::Approx(std::sqrt(cram)).epsilon(1e-12));
  }
}

TEST_CASE("json round trip") {
  const CategoricalDistribution x(SupportSpec(-1.0, 1.0, 3), {0.25, 0.5, 0.25});
  const auto j = dist::to_json(x);
  CHECK(j.contains("v_min"));
  const auto back = dist::distribution_from_json(j);
  check_dist(back, {-1, 0, 1}, {0.25, 0.5, 0.25}, 0.0);
  const CategoricalDistribution y(std::vector<double>{0.0, 1.0, 5.0}, {0.2, 0.3, 0.5});
  const auto jy = dist::to_json(y);
  CHECK(jy.contains("atoms"));
  check_dist(dist::distribution_from_json(jy), {0, 1, 5}, {0.2, 0.3, 0.5}, 0.0);
}
