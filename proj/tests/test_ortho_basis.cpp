#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uvstat/ortho_basis.hpp"
#include "uvstat/rng.hpp"

using namespace uvstat;

TEST_CASE("basis element values match their formulas") {
  const BasisSpec sine = BasisSpec::sine_wiener(10);
  CHECK(eval_basis(sine, 0, 0.3) == 1.0);
  CHECK(std::abs(eval_basis(sine, 1, 1.0) - std::numbers::sqrt2) < 1e-15);
  const double expected =
      std::numbers::sqrt2 * std::sin(std::numbers::pi * 1.5 * 0.4);
  CHECK(std::abs(eval_basis(sine, 2, 0.4) - expected) < 1e-15);

  const BasisSpec disc = BasisSpec::discrete_signed(10);
  CHECK(eval_basis(disc, 0, -3.0) == 1.0);
  CHECK(eval_basis(disc, 2, 2.0) == 2.0);
  CHECK(eval_basis(disc, 2, -2.0) == -2.0);
  CHECK(eval_basis(disc, 2, 1.0) == 0.0);
  CHECK(eval_basis(disc, 3, 3.0) == std::exp2(1.5));
}

TEST_CASE("basis evaluation rejects bad indices and points") {
  const BasisSpec sine = BasisSpec::sine_wiener(5);
  CHECK_THROWS_AS(eval_basis(sine, 6, 0.5), std::out_of_range);
  CHECK_THROWS_AS(eval_basis(sine, 1, 1.5), std::domain_error);
  const BasisSpec disc = BasisSpec::discrete_signed(5);
  CHECK_THROWS_AS(eval_basis(disc, 1, 0.0), std::domain_error);
  CHECK_THROWS_AS(eval_basis(disc, 1, 2.5), std::domain_error);
}

TEST_CASE("marginal expectations: mean zero, unit second moment") {
  const MarginalLaw uni = MarginalLaw::uniform_symmetric();
  const BasisSpec sine = BasisSpec::sine_wiener(6);
  for (uint32_t k = 1; k <= 4; ++k) {
    const double mean =
        uni.expectation([&](double t) { return eval_basis(sine, k, t); });
    const double second = uni.expectation(
        [&](double t) { return eval_basis(sine, k, t) * eval_basis(sine, k, t); });
    CHECK(std::abs(mean) < 1e-8);
    CHECK(std::abs(second - 1.0) < 1e-8);
  }

  const MarginalLaw geo = MarginalLaw::signed_geometric();
  const BasisSpec disc = BasisSpec::discrete_signed(6);
  for (uint32_t k = 1; k <= 4; ++k) {
    const double mean =
        geo.expectation([&](double t) { return eval_basis(disc, k, t); });
    const double second = geo.expectation(
        [&](double t) { return eval_basis(disc, k, t) * eval_basis(disc, k, t); });
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(second - 1.0) < 1e-12);
  }
}

TEST_CASE("gram matrices are identity within their tolerances") {
  const OrthonormalityReport sine =
      check_orthonormal(BasisSpec::sine_wiener(12), 12, 1e-6);
  CHECK(sine.pass);
  CHECK(sine.max_abs_deviation < 1e-6);

  const OrthonormalityReport disc =
      check_orthonormal(BasisSpec::discrete_signed(12), 12, 1e-9);
  CHECK(disc.pass);
  CHECK(disc.max_abs_deviation < 1e-9);
}

TEST_CASE("marginal samples stay in support with the right frequencies") {
  const MarginalLaw uni = MarginalLaw::uniform_symmetric();
  const MarginalLaw geo = MarginalLaw::signed_geometric();
  CounterRng rng(9, 0, RngStream::kGeneric);
  int ones = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = uni.sample(rng);
    CHECK(uni.contains(u));
    const double g = geo.sample(rng);
    CHECK(geo.contains(g));
    if (std::abs(g) == 1.0) ++ones;
  }
  CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.02);
  CHECK_FALSE(uni.contains(1.5));
  CHECK_FALSE(geo.contains(0.0));
  CHECK_FALSE(geo.contains(2.5));
}
