#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uvstat {

// Where a sample set came from; enough to regenerate it exactly.
struct Provenance {
  std::string statistic;  // "U", "U0", "V", "limit_u", ...
  uint64_t kernel_hash = 0;
  uint64_t process_hash = 0;
  uint64_t model_hash = 0;
  uint64_t master_seed = 0;
  std::size_t n = 0;  // path length; 0 for limit-law samples
  std::size_t replicates = 0;
};

struct SampleSet {
  std::vector<double> values;
  Provenance provenance;
};

// Right-continuous ECDF of a sorted sample: #{v <= x} / size.
double ecdf(std::span<const double> sorted_values, double x);

// Two-sample Kolmogorov-Smirnov sup distance between ECDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_two_sample(const SampleSet& a, const SampleSet& b);

// Mean absolute difference of order statistics. Unequal sizes are handled by
// subsampling the larger set without replacement (deterministic in
// subsample_seed) down to the smaller size.
double wasserstein1(std::span<const double> a, std::span<const double> b,
                    uint64_t subsample_seed = 0);
double wasserstein1(const SampleSet& a, const SampleSet& b,
                    uint64_t subsample_seed = 0);

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t replicates = 0;
  double ks = 0.0;
  double w1 = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // KS nonincreasing along the grid, allowing at most one inversion for
  // Monte Carlo noise.
  bool ks_monotone_trend = false;
};

ConvergenceTable convergence_table(const std::vector<SampleSet>& stats,
                                   const SampleSet& limit);

}  // namespace uvstat
