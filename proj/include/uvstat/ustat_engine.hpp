#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "uvstat/kernel.hpp"

namespace uvstat {

// Set partition of the argument positions {0..m-1} with its Mobius weight
// prod over blocks of (-1)^{|B|-1} (|B|-1)!. Summing weight * product of
// block-merged sums over all partitions reproduces the distinct-index sum.
struct PartitionTerm {
  std::vector<std::vector<uint32_t>> blocks;
  long long weight = 1;
};

std::vector<PartitionTerm> enumerate_partitions(uint32_t m);  // m <= 6

// Memoized power sums over one path: for a sorted block of basis indices
// (k_1..k_b), n^{-b/2} sum_j e_{k_1}(X_j) ... e_{k_b}(X_j). Basis columns are
// evaluated once; block sums are shared across partitions and coefficients.
class PowerSumTable {
 public:
  PowerSumTable(const BasisSpec& basis, std::span<const double> path);

  double normalized_power_sum(const MultiIndex& sorted_block);
  // n^-1 sum_{j < n-1} e_k(X_j) e_l(X_{j+1})
  double normalized_adjacent_sum(uint32_t k, uint32_t l);

  std::size_t n() const { return path_.size(); }
  const std::vector<double>& basis_column(uint32_t k);

 private:
  BasisSpec basis_;
  std::span<const double> path_;
  std::unordered_map<uint32_t, std::vector<double>> columns_;
  std::map<MultiIndex, double> power_memo_;
  std::map<std::pair<uint32_t, uint32_t>, double> adjacent_memo_;
};

// Oracles: direct enumeration, guarded by n^m <= 1e8.
double v_stat_naive(const KernelSpec& kernel, std::span<const double> path);
double u_stat_naive(const KernelSpec& kernel, std::span<const double> path);
// Ordered-tuple statistic; the given kernel is used as f_0 and must be
// symmetric unless auto_symmetrize is set, in which case f_0 = symmetrize(f)
// and the result equals u_stat_naive(f).
double u0_stat_naive(const KernelSpec& kernel, std::span<const double> path,
                     bool auto_symmetrize = false);

// Fast paths, O(#coeffs * Bell(m) * n). For order-2 kernels with a diagonal
// override, the adjacent-pair corrections of the Eq-style split are applied
// on top of the series factorization; valid when value coincidences can only
// happen between adjacent indices (continuous marginals).
double v_stat_factored(const KernelSpec& kernel, std::span<const double> path,
                       uint32_t trunc);
double u_stat_factored(const KernelSpec& kernel, std::span<const double> path,
                       uint32_t trunc);

// Order-2 split pieces: U_n = adjacent_diagonal_average + u_stat_offdiagonal.
// (2/n) sum_{i<n} f(X_i, X_{i+1}), override-aware.
double adjacent_diagonal_average(const KernelSpec& kernel,
                                 std::span<const double> path, uint32_t trunc);
// n^-1 sum over |i-j| >= 2 of the series kernel.
double u_stat_offdiagonal(const KernelSpec& kernel,
                          std::span<const double> path, uint32_t trunc);

}  // namespace uvstat
