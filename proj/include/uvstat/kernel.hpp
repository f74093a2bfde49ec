#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uvstat/ortho_basis.hpp"

namespace uvstat {

// Basis multi-index (i_1, ..., i_m); component 0 refers to e_0 == 1 and is
// only legal in deliberately non-canonical test tensors.
using MultiIndex = std::vector<uint32_t>;

enum class EigenFormula { kWienerInverseSquare, kOneOverK, kList };

// Coefficient sequence lambda_k, k >= 1, of a rank-diagonal kernel
// sum_k lambda_k e_k(t) e_k(s).
struct EigenSeries {
  EigenFormula formula = EigenFormula::kWienerInverseSquare;
  std::vector<double> values;  // kList only
  bool summable = true;        // sum_k |lambda_k| < inf

  // wiener(): lambda_k = (pi (k - 1/2))^-2, summable with sum 1/2.
  static EigenSeries wiener();
  // one_over_k(): lambda_k = 1/k, square-summable but not summable.
  static EigenSeries one_over_k();
  static EigenSeries list(std::vector<double> values);

  double lambda(uint32_t k) const;        // k >= 1
  double partial_sum(uint32_t upto) const;
  // sum_{k > after} lambda_k; +inf when not summable. The wiener tail is a
  // direct partial sum plus the midpoint integral remainder, accurate to
  // O(tail_length^-3).
  double tail_sum(uint32_t after) const;
  std::string describe() const;
};

struct KernelSpec {
  uint32_t order = 2;  // m
  BasisSpec basis;
  std::map<MultiIndex, double> coeffs;  // explicit sparse tensor
  std::optional<EigenSeries> eigen;     // rank-diagonal form
  // Constant value forced on the full diagonal t_1 = ... = t_m. Only
  // meaningful with a continuous marginal: with atoms, off-diagonal index
  // tuples hit equal values with positive probability at every lag and the
  // factored evaluators would no longer match the naive ones.
  std::optional<double> diagonal_value;

  static KernelSpec tensor(BasisSpec basis, uint32_t order,
                           std::map<MultiIndex, double> coeffs);
  static KernelSpec eigen_diagonal(BasisSpec basis, EigenSeries series,
                                   uint32_t order = 2);
  KernelSpec with_diagonal(double value) const;

  bool is_eigen() const { return eigen.has_value(); }
  bool summable() const { return eigen ? eigen->summable : true; }

  // Visits stored coefficients with max component <= trunc in a fixed
  // deterministic order (lexicographic; ascending k for eigen series).
  void for_each_coeff(
      uint32_t trunc,
      const std::function<void(const MultiIndex&, double)>& fn) const;

  std::string describe() const;
  uint64_t hash() const;
};

// Series value sum_{max i <= trunc} f_i prod_j e_{i_j}(t_j); if the diagonal
// override is set and all points are equal, returns the override instead.
double eval_kernel(const KernelSpec& spec, std::span<const double> points,
                   uint32_t trunc);

// Same sum, never the override. Used where the series part of an
// override kernel is needed on the diagonal.
double eval_kernel_series(const KernelSpec& spec, std::span<const double> points,
                          uint32_t trunc);

// Canonicity check: mean over mc_size outer draws of the squared slot-k
// conditional expectation, the latter computed by quadrature or exact
// summation against the marginal (slot is 1-based).
double degeneracy_defect(const KernelSpec& spec, uint32_t slot,
                         std::size_t mc_size, uint64_t seed);

// f_0(t_1..t_m) = sum over all argument permutations of f. No 1/m! factor:
// a symmetric input comes back scaled by m!.
KernelSpec symmetrize(const KernelSpec& spec);

bool is_symmetric(const KernelSpec& spec);

// sum_{max i > N} |f_i|; closed form for eigen series, exact for finite
// tensors; +inf in the non-summable regime.
double tail_mass(const KernelSpec& spec, uint32_t trunc);

// E f(Y,...,Y) for the truncated series, or the override value when set.
double diagonal_expectation(const KernelSpec& spec, uint32_t trunc);

// sign(ts) min(|t|, |s|): the covariance-type kernel that the wiener eigen
// series reconstructs on [-1,1]^2.
double signed_min_kernel(double t, double s);

}  // namespace uvstat
