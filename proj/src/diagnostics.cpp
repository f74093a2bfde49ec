#include "uvstat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uvstat/rng.hpp"

namespace uvstat {

double ecdf(std::span<const double> sorted_values, double x) {
  if (sorted_values.empty()) throw std::invalid_argument("ecdf: empty sample");
  const auto it =
      std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample(const SampleSet& a, const SampleSet& b) {
  return ks_two_sample(std::span<const double>(a.values),
                       std::span<const double>(b.values));
}

namespace {

std::vector<double> subsample_without_replacement(std::span<const double> v,
                                                  std::size_t target,
                                                  uint64_t seed) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed, 0, RngStream::kSubsample);
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_unit() *
                                     static_cast<double>(order.size() - i));
    std::swap(order[i], order[std::min(j, order.size() - 1)]);
  }
  std::vector<double> out(target);
  for (std::size_t i = 0; i < target; ++i) out[i] = v[order[i]];
  return out;
}

}  // namespace

double wasserstein1(std::span<const double> a, std::span<const double> b,
                    uint64_t subsample_seed) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  if (sa.size() > sb.size())
    sa = subsample_without_replacement(a, sb.size(), subsample_seed);
  else if (sb.size() > sa.size())
    sb = subsample_without_replacement(b, sa.size(), subsample_seed);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double s = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
  return s / static_cast<double>(sa.size());
}

double wasserstein1(const SampleSet& a, const SampleSet& b,
                    uint64_t subsample_seed) {
  return wasserstein1(std::span<const double>(a.values),
                      std::span<const double>(b.values), subsample_seed);
}

ConvergenceTable convergence_table(const std::vector<SampleSet>& stats,
                                   const SampleSet& limit) {
  ConvergenceTable table;
  for (const SampleSet& s : stats) {
    ConvergenceRow row;
    row.n = s.provenance.n;
    row.replicates = s.values.size();
    row.ks = ks_two_sample(s, limit);
    row.w1 = wasserstein1(s, limit, s.provenance.master_seed);
    table.rows.push_back(row);
  }
  std::size_t inversions = 0;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    if (table.rows[i + 1].ks > table.rows[i].ks) ++inversions;
  table.ks_monotone_trend = inversions <= 1;
  return table;
}

}  // namespace uvstat
