#include "uvstat/process.hpp"

#include <limits>
#include <stdexcept>

#include "uvstat/common.hpp"
#include "uvstat/rng.hpp"

namespace uvstat {

ProcessSpec ProcessSpec::iid(MarginalLaw marginal, uint64_t master_seed) {
  return {ProcessId::kIid, marginal, master_seed};
}

ProcessSpec ProcessSpec::one_dependent_shift(MarginalLaw marginal,
                                             uint64_t master_seed) {
  return {ProcessId::kOneDependentShift, marginal, master_seed};
}

std::string ProcessSpec::describe() const {
  return std::string(id == ProcessId::kIid ? "iid" : "one_dependent_shift") +
         " / " + marginal.describe();
}

uint64_t ProcessSpec::hash() const { return fnv1a64(describe()); }

std::vector<double> sample_path(const ProcessSpec& spec, std::size_t n,
                                uint64_t replicate_id) {
  if (n == 0) throw std::invalid_argument("sample_path: n must be >= 1");
  CounterRng marginal_rng(spec.master_seed, replicate_id, RngStream::kMarginal);
  if (spec.id == ProcessId::kIid) {
    std::vector<double> x(n);
    for (auto& v : x) v = spec.marginal.sample(marginal_rng);
    return x;
  }
  std::vector<double> y(n + 1);
  for (auto& v : y) v = spec.marginal.sample(marginal_rng);
  CounterRng shift_rng(spec.master_seed, replicate_id, RngStream::kShift);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = y[i + (shift_rng.next_bit() ? 1 : 0)];
  return x;
}

double lag_moment(const ProcessSpec& spec, const BasisSpec& basis, uint32_t k,
                  uint32_t l, uint32_t lag, std::size_t mc_size,
                  uint64_t replicate_id) {
  if (mc_size == 0) {
    if (lag == 0) return k == l ? 1.0 : 0.0;
    if (spec.id == ProcessId::kIid || lag >= 2) return 0.0;
    // lag 1: e_k and e_l see the same Y exactly when xi_i = 1, xi_{i+1} = 0
    return k == l ? 0.25 : 0.0;
  }
  const std::vector<double> x = sample_path(spec, mc_size + lag, replicate_id);
  std::vector<double> terms(mc_size);
  for (std::size_t i = 0; i < mc_size; ++i)
    terms[i] = eval_basis(basis, k, x[i]) * eval_basis(basis, l, x[i + lag]);
  return pairwise_sum(terms) / static_cast<double>(mc_size);
}

MixingProfile mixing_profile(const ProcessSpec& spec) {
  MixingProfile p;
  if (spec.id == ProcessId::kIid) {
    p.zero_from = 1;
    p.absolutely_continuous_joints = true;
    return p;
  }
  p.zero_from = 2;
  p.alpha_bound = 0.25;
  p.phi_bound = 1.0;
  p.psi_bound = std::numeric_limits<double>::infinity();
  p.sum_sqrt_phi_finite = true;  // finitely many nonzero terms
  p.absolutely_continuous_joints = spec.marginal.is_discrete();
  return p;
}

}  // namespace uvstat
