#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "uvstat/process.hpp"
#include "uvstat/rng.hpp"
#include "uvstat/ustat_engine.hpp"

using namespace uvstat;

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

KernelSpec random_tensor(const BasisSpec& basis, uint32_t m, uint64_t seed,
                         uint32_t max_component) {
  CounterRng rng(seed, 0, RngStream::kGeneric);
  std::map<MultiIndex, double> coeffs;
  const int terms = 2 + static_cast<int>(rng.next_unit() * 4);
  for (int t = 0; t < terms; ++t) {
    MultiIndex idx(m);
    for (auto& c : idx)
      c = 1 + static_cast<uint32_t>(rng.next_unit() * max_component);
    coeffs[idx] = rng.next_symmetric();
  }
  return KernelSpec::tensor(basis, m, coeffs);
}

}  // namespace

TEST_CASE("partition enumeration has bell-number counts and correct weights") {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203};
  for (uint32_t m = 1; m <= 6; ++m)
    CHECK(enumerate_partitions(m).size() == bell[m]);

  // m = 3: singletons +1, three pair merges -1, full merge +2
  long long weight_sum = 0;
  for (const PartitionTerm& p : enumerate_partitions(3)) weight_sum += p.weight;
  CHECK(weight_sum == 1 - 3 + 2);
  CHECK_THROWS_AS(enumerate_partitions(7), std::invalid_argument);
}

TEST_CASE("power sums match direct evaluation") {
  const BasisSpec basis = BasisSpec::sine_wiener(10);
  const ProcessSpec iid = ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 3);
  const std::vector<double> path = sample_path(iid, 25, 0);
  PowerSumTable table(basis, path);

  double s1 = 0.0, s12 = 0.0, adj = 0.0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    s1 += eval_basis(basis, 1, path[j]);
    s12 += eval_basis(basis, 1, path[j]) * eval_basis(basis, 2, path[j]);
    if (j + 1 < path.size())
      adj += eval_basis(basis, 1, path[j]) * eval_basis(basis, 2, path[j + 1]);
  }
  const double n = static_cast<double>(path.size());
  CHECK(rel_err(table.normalized_power_sum({1}), s1 / std::sqrt(n)) < 1e-14);
  CHECK(rel_err(table.normalized_power_sum({1, 2}), s12 / n) < 1e-14);
  CHECK(rel_err(table.normalized_adjacent_sum(1, 2), adj / n) < 1e-14);
}

TEST_CASE("factored statistics equal the naive oracles for plain kernels") {
  const BasisSpec sine = BasisSpec::sine_wiener(12);
  const BasisSpec disc = BasisSpec::discrete_signed(12);
  const ProcessSpec procs[] = {
      ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 19),
      ProcessSpec::one_dependent_shift(MarginalLaw::signed_geometric(), 19)};
  for (const ProcessSpec& proc : procs) {
    const BasisSpec& basis =
        proc.marginal.is_discrete() ? disc : sine;
    for (uint32_t m = 1; m <= 3; ++m) {
      for (uint64_t seed = 0; seed < 5; ++seed) {
        const KernelSpec kernel = random_tensor(basis, m, 100 * m + seed, 8);
        const std::vector<double> path = sample_path(proc, 20, seed);
        CHECK(rel_err(v_stat_factored(kernel, path, 12),
                      v_stat_naive(kernel, path)) < 1e-10);
        CHECK(rel_err(u_stat_factored(kernel, path, 12),
                      u_stat_naive(kernel, path)) < 1e-10);
      }
    }
  }
}

TEST_CASE("factored statistics equal the naive oracles for eigen kernels") {
  const BasisSpec basis = BasisSpec::sine_wiener(15);
  const KernelSpec kernel =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  const ProcessSpec proc =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 23);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<double> path = sample_path(proc, 30, seed);
    CHECK(rel_err(v_stat_factored(kernel, path, 15),
                  v_stat_naive(kernel, path)) < 1e-10);
    CHECK(rel_err(u_stat_factored(kernel, path, 15),
                  u_stat_naive(kernel, path)) < 1e-10);
  }
}

TEST_CASE("override kernels stay oracle-exact on paths with coincidences") {
  const BasisSpec basis = BasisSpec::sine_wiener(15);
  const KernelSpec kernel =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2)
          .with_diagonal(2.0);
  const ProcessSpec proc =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 29);
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const std::vector<double> path = sample_path(proc, 40, seed);
    std::size_t coincidences = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (path[i] == path[i + 1]) ++coincidences;
    CHECK(rel_err(u_stat_factored(kernel, path, 15),
                  u_stat_naive(kernel, path)) < 1e-10);
    CHECK(rel_err(v_stat_factored(kernel, path, 15),
                  v_stat_naive(kernel, path)) < 1e-10);
    if (seed == 0) CHECK(coincidences > 0);  // the correction is exercised
  }
}

TEST_CASE("ordered-tuple statistic matches the distinct-tuple one") {
  const BasisSpec basis = BasisSpec::sine_wiener(10);
  const ProcessSpec iid = ProcessSpec::iid(MarginalLaw::uniform_symmetric(), 7);
  const std::vector<double> path = sample_path(iid, 18, 0);

  const KernelSpec asym = random_tensor(basis, 2, 77, 6);
  CHECK(rel_err(u0_stat_naive(asym, path, true), u_stat_naive(asym, path)) <
        1e-12);
  CHECK(rel_err(u0_stat_naive(symmetrize(asym), path),
                u_stat_naive(asym, path)) < 1e-12);
  CHECK_THROWS_AS(u0_stat_naive(asym, path), std::invalid_argument);

  const KernelSpec m3 = random_tensor(basis, 3, 78, 5);
  CHECK(rel_err(u0_stat_naive(m3, path, true), u_stat_naive(m3, path)) < 1e-12);
}

TEST_CASE("order-2 split: U equals diagonal average plus off-diagonal part") {
  const BasisSpec basis = BasisSpec::sine_wiener(15);
  const ProcessSpec proc =
      ProcessSpec::one_dependent_shift(MarginalLaw::uniform_symmetric(), 41);
  const KernelSpec plain =
      KernelSpec::eigen_diagonal(basis, EigenSeries::wiener(), 2);
  const KernelSpec withdiag = plain.with_diagonal(1.5);
  for (const KernelSpec& kernel : {plain, withdiag}) {
    const std::vector<double> path = sample_path(proc, 60, 1);
    const double u = u_stat_factored(kernel, path, 15);
    const double split = adjacent_diagonal_average(kernel, path, 15) +
                         u_stat_offdiagonal(kernel, path, 15);
    CHECK(rel_err(u, split) < 1e-11);
  }
}

TEST_CASE("small-n and guard behavior") {
  const BasisSpec basis = BasisSpec::sine_wiener(5);
  const KernelSpec kernel = random_tensor(basis, 3, 5, 4);
  const std::vector<double> tiny = {0.1, 0.2};
  CHECK(u_stat_naive(kernel, tiny) == 0.0);       // n < m
  CHECK(u_stat_factored(kernel, tiny, 5) == 0.0);

  const std::vector<double> big(1000, 0.1);
  const KernelSpec m4 = random_tensor(basis, 4, 6, 4);
  CHECK_THROWS_AS(v_stat_naive(m4, big), std::invalid_argument);  // n^m guard
}
