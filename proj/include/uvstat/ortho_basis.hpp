#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "uvstat/rng.hpp"

namespace uvstat {

enum class MarginalId { kUniformSymmetric, kSignedGeometric };
enum class BasisFamily { kSineWiener, kDiscreteSigned };

// Marginal law of a single observation.
//   UniformSymmetric: density 1/2 on [-1, 1].
//   SignedGeometric:  mass 2^{-|k|-1} on every nonzero integer k.
struct MarginalLaw {
  MarginalId id = MarginalId::kUniformSymmetric;

  static MarginalLaw uniform_symmetric() { return {MarginalId::kUniformSymmetric}; }
  static MarginalLaw signed_geometric() { return {MarginalId::kSignedGeometric}; }

  bool is_discrete() const { return id == MarginalId::kSignedGeometric; }
  bool contains(double t) const;

  // E[g(Y)]: adaptive quadrature against the density in the continuous case,
  // exact summation over the support (tail mass < 1e-15) in the discrete one.
  double expectation(const std::function<double(double)>& g,
                     double quad_tol = 1e-10) const;

  double sample(CounterRng& rng) const;

  std::string describe() const;
};

// Orthonormal family {e_k, k >= 0} over a marginal, with e_0 == 1.
//   SineWiener over UniformSymmetric:   e_k(t) = sqrt(2) sin(pi (k - 1/2) t)
//   DiscreteSigned over SignedGeometric: e_k(t) = sign(t) 2^{k/2} [|t| == k]
struct BasisSpec {
  BasisFamily family = BasisFamily::kSineWiener;
  MarginalLaw marginal;
  uint32_t max_index = 0;

  static BasisSpec sine_wiener(uint32_t max_index = 200);
  static BasisSpec discrete_signed(uint32_t max_index = 40);

  std::string describe() const;
  uint64_t hash() const;
};

// e_k evaluated at t. Throws std::out_of_range for k > spec.max_index and
// std::domain_error when t lies outside the marginal's support.
double eval_basis(const BasisSpec& spec, uint32_t k, double t);

// Gram matrix G(j,k) = E[e_j(Y) e_k(Y)] for j,k in 0..upto, computed against
// the marginal (quadrature or exact summation), not by sampling.
Eigen::MatrixXd gram_matrix(const BasisSpec& spec, uint32_t upto,
                            double quad_tol = 1e-10);

struct OrthonormalityReport {
  uint32_t upto = 0;
  double tol = 0.0;
  double max_abs_deviation = 0.0;  // max |G - I| entrywise
  bool pass = false;
};

OrthonormalityReport check_orthonormal(const BasisSpec& spec, uint32_t upto,
                                       double tol);

}  // namespace uvstat
