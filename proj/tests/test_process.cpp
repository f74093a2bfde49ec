#include <doctest.h>

#include <cmath>
#include <vector>

#include "uvstat/process.hpp"

using namespace uvstat;

TEST_CASE("paths are deterministic per replicate and respect the marginal") {
  const ProcessSpec iid = ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 11);
  const std::vector<double> a = sample_path(iid, 100, 3);
  const std::vector<double> b = sample_path(iid, 100, 3);
  const std::vector<double> c = sample_path(iid, 100, 4);
  CHECK(a.size() == 100);
  CHECK(a == b);
  CHECK(a != c);
  for (double x : a) CHECK(iid.marginal.contains(x));

  const ProcessSpec shift =
      ProcessSpec::one_dependent_shift(MarginalLaw::signed_geometric(), 11);
  const std::vector<double> s = sample_path(shift, 100, 0);
  for (double x : s) CHECK(shift.marginal.contains(x));
}

TEST_CASE("adjacent values of the shifted sequence coincide a quarter of the time") {
  const ProcessSpec shift =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 5);
  const std::size_t n = 40000;
  const std::vector<double> x = sample_path(shift, n, 0);
  std::size_t equal = 0;
  std::size_t equal_lag2 = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (x[i] == x[i + 1]) ++equal;
    if (i + 2 < n && x[i] == x[i + 2]) ++equal_lag2;
  }
  CHECK(std::abs(static_cast<double>(equal) / (n - 1) - 0.25) < 0.01);
  CHECK(equal_lag2 == 0);  // lag-2 coincidences have probability zero
}

TEST_CASE("analytic lag moments") {
  const ProcessSpec iid = ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 1);
  const BasisSpec sine = BasisSpec::sine_wiener(10);
  CHECK(lag_moment(iid, sine, 2, 2, 0) == 1.0);
  CHECK(lag_moment(iid, sine, 1, 2, 0) == 0.0);
  CHECK(lag_moment(iid, sine, 2, 2, 1) == 0.0);

  const ProcessSpec shift =
      ProcessSpec::one_dependent_shift(MarginalLaw::signed_geometric(), 1);
  const BasisSpec disc = BasisSpec::discrete_signed(10);
  CHECK(lag_moment(shift, disc, 3, 3, 0) == 1.0);
  CHECK(lag_moment(shift, disc, 3, 3, 1) == 0.25);
  CHECK(lag_moment(shift, disc, 2, 3, 1) == 0.0);
  CHECK(lag_moment(shift, disc, 3, 3, 2) == 0.0);
}

TEST_CASE("monte carlo lag moments approach the analytic values") {
  const ProcessSpec shift =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 17);
  const BasisSpec sine = BasisSpec::sine_wiener(10);
  const double mc0 = lag_moment(shift, sine, 1, 1, 0, 40000, 0);
  const double mc1 = lag_moment(shift, sine, 1, 1, 1, 40000, 0);
  const double mc_cross = lag_moment(shift, sine, 1, 2, 1, 40000, 0);
  CHECK(std::abs(mc0 - 1.0) < 0.05);
  CHECK(std::abs(mc1 - 0.25) < 0.05);
  CHECK(std::abs(mc_cross) < 0.05);
}

TEST_CASE("mixing profiles") {
  const ProcessSpec iid = ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 1);
  const MixingProfile mi = mixing_profile(iid);
  CHECK(mi.zero_from == 1);
  CHECK(mi.alpha(1) == 0.0);
  CHECK(mi.absolutely_continuous_joints);

  const ProcessSpec cont =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 1);
  const MixingProfile mc = mixing_profile(cont);
  CHECK(mc.zero_from == 2);
  CHECK(mc.alpha(1) <= 0.25);
  CHECK(mc.alpha(2) == 0.0);
  CHECK(mc.phi(1) <= 1.0);
  CHECK(mc.sum_sqrt_phi_finite);
  CHECK_FALSE(mc.absolutely_continuous_joints);  // adjacent pairs share an atom

  const ProcessSpec disc =
      ProcessSpec::one_dependent_shift(MarginalLaw::signed_geometric(), 1);
  CHECK(mixing_profile(disc).absolutely_continuous_joints);
}
