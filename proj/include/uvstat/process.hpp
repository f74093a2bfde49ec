#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uvstat/ortho_basis.hpp"

namespace uvstat {

enum class ProcessId { kIid, kOneDependentShift };

// Stationary sequence generator. OneDependentShift is X_i = Y_{i + xi_i}
// with {Y_i} iid from the marginal and {xi_i} iid Bernoulli(1/2) flips,
// independent of {Y_i}; the result is stationary, 1-dependent, has the same
// marginal as Y, and adjacent values coincide with probability 1/4.
struct ProcessSpec {
  ProcessId id = ProcessId::kIid;
  MarginalLaw marginal;
  uint64_t master_seed = 0;

  static ProcessSpec iid(MarginalLaw marginal, uint64_t master_seed);
  static ProcessSpec one_dependent_shift(MarginalLaw marginal,
                                         uint64_t master_seed);

  std::string describe() const;
  uint64_t hash() const;
};

// Deterministic in (master_seed, replicate_id); draws Y_1..Y_{n+1} and
// xi_1..xi_n from their own streams, then maps.
std::vector<double> sample_path(const ProcessSpec& spec, std::size_t n,
                                uint64_t replicate_id);

// E[e_k(X_1) e_l(X_{1+lag})]. Analytic for both shipped processes
// (OneDependentShift: lag 0 -> delta_kl, lag 1 -> delta_kl/4, lag >= 2 -> 0);
// mc_size > 0 switches to a time-average estimate over one path instead.
double lag_moment(const ProcessSpec& spec, const BasisSpec& basis, uint32_t k,
                  uint32_t l, uint32_t lag, std::size_t mc_size = 0,
                  uint64_t replicate_id = 0);

// Closed-form dependence summary. Coefficients are exact zeros from
// zero_from on; below that only conservative bounds are reported.
struct MixingProfile {
  uint32_t zero_from = 1;  // alpha(i) = phi(i) = psi(i) = 0 for i >= zero_from
  double alpha_bound = 0.0;
  double phi_bound = 0.0;
  double psi_bound = 0.0;  // +inf when no useful bound below zero_from
  bool sum_sqrt_phi_finite = true;
  // Joint laws of distinct-index observations absolutely continuous w.r.t.
  // the product law. Fails for the shift process over a continuous marginal:
  // P(X_1 = X_2) = 1/4 while the product law puts mass 0 on the diagonal.
  bool absolutely_continuous_joints = true;

  double alpha(uint32_t i) const { return i >= zero_from ? 0.0 : alpha_bound; }
  double phi(uint32_t i) const { return i >= zero_from ? 0.0 : phi_bound; }
  double psi(uint32_t i) const { return i >= zero_from ? 0.0 : psi_bound; }
};

MixingProfile mixing_profile(const ProcessSpec& spec);

}  // namespace uvstat
