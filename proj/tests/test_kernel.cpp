#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uvstat/kernel.hpp"
#include "uvstat/rng.hpp"

using namespace uvstat;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("wiener eigenvalues: formula, partial sums, tail bound") {
  const EigenSeries w = EigenSeries::wiener();
  CHECK(std::abs(w.lambda(1) - 4.0 / (kPi * kPi)) < 1e-15);
  CHECK(std::abs(w.lambda(2) - 4.0 / (9.0 * kPi * kPi)) < 1e-15);
  CHECK_THROWS_AS(w.lambda(0), std::out_of_range);
  CHECK(w.summable);

  // sum lambda_k = 1/2; head + integral-remainder tail reproduces it closely
  CHECK(std::abs(w.partial_sum(100) + w.tail_sum(100) - 0.5) < 1e-9);
  CHECK(std::abs(w.partial_sum(100000) + w.tail_sum(100000) - 0.5) < 1e-3);

  const EigenSeries inv = EigenSeries::one_over_k();
  CHECK(inv.lambda(5) == 0.2);
  CHECK_FALSE(inv.summable);
  CHECK(inv.tail_sum(10) == std::numeric_limits<double>::infinity());

  const EigenSeries fin = EigenSeries::list({0.5, 0.25, 0.125});
  CHECK(fin.partial_sum(2) == 0.75);
  CHECK(fin.tail_sum(1) == 0.375);
  CHECK(fin.tail_sum(3) == 0.0);
  CHECK(fin.lambda(7) == 0.0);
}

TEST_CASE("truncated wiener eigen-series reconstructs the signed min kernel") {
  const BasisSpec basis = BasisSpec::sine_wiener(10000);
  const KernelSpec spec =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  const double bound = 2.0 * EigenSeries::wiener().tail_sum(10000);
  CounterRng rng(31, 0, RngStream::kGeneric);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.next_symmetric();
    const double s = rng.next_symmetric();
    const double pts[2] = {t, s};
    const double series = eval_kernel(spec, pts, 10000);
    CHECK(std::abs(series - signed_min_kernel(t, s)) <= bound + 1e-12);
  }
  CHECK(signed_min_kernel(0.5, -0.3) == -0.3);
  CHECK(signed_min_kernel(-0.5, -0.3) == 0.3);
  CHECK(signed_min_kernel(0.2, 0.7) == 0.2);
}

TEST_CASE("diagonal override replaces the series value only on the diagonal") {
  const BasisSpec basis = BasisSpec::sine_wiener(50);
  const KernelSpec base =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  const KernelSpec spec = base.with_diagonal(2.0);
  const double diag_pts[2] = {0.4, 0.4};
  const double off_pts[2] = {0.4, 0.5};
  CHECK(eval_kernel(spec, diag_pts, 50) == 2.0);
  CHECK(eval_kernel(spec, off_pts, 50) ==
        eval_kernel(base, off_pts, 50));
  CHECK(eval_kernel_series(spec, diag_pts, 50) ==
        eval_kernel(base, diag_pts, 50));

  const KernelSpec disc =
      KernelSpec::eigen_diagonal(BasisSpec::discrete_signed(10),
                                 EigenSeries::wiener(), 2);
  CHECK_THROWS_AS(disc.with_diagonal(1.0), std::invalid_argument);
}

TEST_CASE("degeneracy defect is zero for canonical kernels, positive otherwise") {
  const BasisSpec basis = BasisSpec::sine_wiener(30);
  const KernelSpec canonical =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  CHECK(degeneracy_defect(canonical, 1, 40, 5) < 1e-12);
  CHECK(degeneracy_defect(canonical, 2, 40, 5) < 1e-12);

  // f(t,s) = e_1(s): integrating out slot 2 kills it, slot 1 leaves e_1(s)
  const KernelSpec skew =
      KernelSpec::tensor(basis, 2, {{MultiIndex{0, 1}, 1.0}});
  CHECK(degeneracy_defect(skew, 2, 40, 5) < 1e-12);
  const double defect = degeneracy_defect(skew, 1, 400, 5);
  CHECK(std::abs(defect - 1.0) < 0.05);  // E e_1(s)^2 == 1
}

TEST_CASE("symmetrize sums over argument permutations without 1/m!") {
  const BasisSpec basis = BasisSpec::sine_wiener(10);
  const KernelSpec asym =
      KernelSpec::tensor(basis, 2, {{MultiIndex{1, 2}, 0.7}});
  CHECK_FALSE(is_symmetric(asym));
  const KernelSpec sym = symmetrize(asym);
  CHECK(is_symmetric(sym));
  CHECK(sym.coeffs.at(MultiIndex{1, 2}) == 0.7);
  CHECK(sym.coeffs.at(MultiIndex{2, 1}) == 0.7);

  const KernelSpec eigen =
      KernelSpec::eigen_diagonal(basis, EigenSeries::list({0.5, 0.25}), 2);
  CHECK(is_symmetric(eigen));
  const KernelSpec doubled = symmetrize(eigen);
  const double pts[2] = {0.3, 0.8};
  CHECK(std::abs(eval_kernel(doubled, pts, 10) -
                 2.0 * eval_kernel(eigen, pts, 10)) < 1e-15);
}

TEST_CASE("tail mass and diagonal expectation") {
  const BasisSpec basis = BasisSpec::sine_wiener(500);
  const KernelSpec wiener =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  CHECK(std::abs(tail_mass(wiener, 100) - EigenSeries::wiener().tail_sum(100)) <
        1e-15);
  CHECK(std::abs(diagonal_expectation(wiener, 400) -
                 EigenSeries::wiener().partial_sum(400)) < 1e-6);
  CHECK(diagonal_expectation(wiener.with_diagonal(2.0), 400) == 2.0);

  const KernelSpec divergent = KernelSpec::eigen_diagonal(
      BasisSpec::discrete_signed(40), EigenSeries::one_over_k(), 2);
  CHECK(tail_mass(divergent, 10) == std::numeric_limits<double>::infinity());

  const KernelSpec tens = KernelSpec::tensor(
      basis, 2, {{MultiIndex{1, 2}, 0.5}, {MultiIndex{3, 3}, -0.25}});
  CHECK(tail_mass(tens, 2) == 0.25);
  CHECK(tail_mass(tens, 3) == 0.0);
}

TEST_CASE("kernel hashing separates specs and describe is stable") {
  const BasisSpec basis = BasisSpec::sine_wiener(20);
  const KernelSpec a = KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  const KernelSpec b = KernelSpec::eigen_diagonal(basis, EigenSeries::one_over_k(), 2);
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2).hash());
  CHECK_FALSE(a.describe().empty());
}
