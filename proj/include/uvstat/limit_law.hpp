#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uvstat/kernel.hpp"
#include "uvstat/process.hpp"

namespace uvstat {

// Probabilists' Hermite polynomial: H_0 = 1, H_1 = x, H_{n+1} = x H_n - n H_{n-1}.
double hermite(uint32_t k, double x);

// Multi-index (i_1..i_m) grouped as distinct indices with multiplicities
// nu_j = #{r : i_r == j}; the limit factor for the index is
// prod H_{nu_j}(tau_j) over the distinct j.
struct MultiplicityProfile {
  std::vector<std::pair<uint32_t, uint32_t>> factors;  // (index, multiplicity)
  uint32_t total = 0;                                  // always == m
};

MultiplicityProfile multiplicity_profile(const MultiIndex& idx);

// Limit covariance of the normalized basis sums: Sigma_kl = E tau_k tau_l,
// assembled from lag moments and repaired to PSD if needed.
struct CovarianceModel {
  Eigen::MatrixXd sigma;       // symmetric, PSD after repair
  Eigen::MatrixXd factor;      // factor * factor^T == sigma
  Eigen::MatrixXd stderr_map;  // per-entry MC standard errors; empty when analytic
  bool psd_repaired = false;
  double repair_magnitude = 0.0;  // |most negative clipped eigenvalue|

  Eigen::Index dim() const { return sigma.rows(); }

  static CovarianceModel identity(Eigen::Index n);
  static CovarianceModel scaled_identity(Eigen::Index n, double value);
  // Symmetrizes, clips negative eigenvalues to zero, stores an exact square
  // root factor. Diagonal inputs factor exactly as sqrt of the diagonal.
  static CovarianceModel from_matrix(Eigen::MatrixXd sigma);

  uint64_t hash() const;
  void write_csv(std::ostream& os) const;  // dim header + dense rows
};

enum class CovarianceMode { kAnalytic, kMonteCarlo };

// Sigma_kl = E e_k e_l (lag 0) + sum_{j<=L} [E e_k(X_1)e_l(X_{1+j}) +
// E e_l(X_1)e_k(X_{1+j})]. Analytic mode uses the closed-form lag moments
// (exact for the 1-dependent process with L >= 1); MC mode estimates from a
// single long path and records batch-means standard errors per entry.
CovarianceModel build_covariance(const ProcessSpec& process,
                                 const BasisSpec& basis, uint32_t N, uint32_t L,
                                 CovarianceMode mode,
                                 std::size_t mc_path_length = 100000);

// Centered Gaussian vector with covariance model.sigma; deterministic in
// (master_seed, replicate_id). For identity factors the components are the
// raw stream normals, so samplers sharing a replicate share the same tau.
std::vector<double> sample_tau(const CovarianceModel& model,
                               uint64_t master_seed, uint64_t replicate_id);

// Hermite-form limit of U_n: sum over multi-indices with max <= trunc of
// f_i prod_j H_{nu_j}(tau_j). Requires absolutely summable coefficients.
double limit_u_given_tau(const KernelSpec& kernel, std::span<const double> tau,
                         uint32_t trunc);
double limit_u_sample(const KernelSpec& kernel, const CovarianceModel& model,
                      uint32_t trunc, uint64_t master_seed,
                      uint64_t replicate_id);

// Monomial-form limit of V_n: sum f_i tau_{i_1} ... tau_{i_m}.
double limit_v_given_tau(const KernelSpec& kernel, std::span<const double> tau,
                         uint32_t trunc);
double limit_v_sample(const KernelSpec& kernel, const CovarianceModel& model,
                      uint32_t trunc, uint64_t master_seed,
                      uint64_t replicate_id);

// Limit of U_n for the order-2 diagonal-override kernel over the 1-dependent
// shift: E f(Y,Y)/2 + sum_k lambda_k (tau_k^2 - Var tau_k), with Var tau_k
// taken from the model diagonal (3/2 for the intended model).
double prop2_limit_sample(const KernelSpec& kernel,
                          const CovarianceModel& model, uint32_t trunc,
                          uint64_t master_seed, uint64_t replicate_id);

// The claimed quadratic law sum_k lambda_k (tau_k^2 - 1) with tau drawn from
// the given covariance model. Matches limit_u only when the model is the
// identity; used as the refuted comparison law.
double claimed_quadratic_sample(const KernelSpec& kernel,
                                const CovarianceModel& model, uint32_t trunc,
                                uint64_t master_seed, uint64_t replicate_id);

// sum_k lambda_k (tau_k^2 - Var tau_k): the mean-zero quadratic form that the
// off-diagonal remainder of an order-2 U-statistic stabilizes to. Defined for
// square-summable lambda even when sum lambda_k diverges.
double centered_quadratic_sample(const KernelSpec& kernel,
                                 const CovarianceModel& model, uint32_t trunc,
                                 uint64_t master_seed, uint64_t replicate_id);

struct DivergenceRow {
  std::size_t n = 0;
  double median_u = 0.0;
  double median_diag = 0.0;
};

struct DivergenceStudy {
  std::vector<DivergenceRow> rows;
  std::vector<std::vector<double>> u_samples;        // per grid point
  std::vector<std::vector<double>> diag_samples;     // (2/n) sum f(X_i, X_{i+1})
  std::vector<std::vector<double>> offdiag_samples;  // the stabilizing remainder
  bool diagonal_mean_finite = true;  // formal E f(Y,Y): sum lambda_k < inf?
};

// Divergence experiment: per n, medians over R replicates of U_n and of the
// adjacent diagonal average, plus the remainder samples whose law stabilizes.
DivergenceStudy prop4_divergence_stat(const KernelSpec& kernel,
                                      const ProcessSpec& process,
                                      std::span<const std::size_t> n_grid,
                                      std::size_t replicates, unsigned workers);

}  // namespace uvstat
