#include "uvstat/limit_law.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "uvstat/common.hpp"
#include "uvstat/rng.hpp"
#include "uvstat/ustat_engine.hpp"

namespace uvstat {

double hermite(uint32_t k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (uint32_t n = 1; n < k; ++n) {
    const double next = x * cur - static_cast<double>(n) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

MultiplicityProfile multiplicity_profile(const MultiIndex& idx) {
  MultiplicityProfile p;
  p.total = static_cast<uint32_t>(idx.size());
  MultiIndex sorted(idx);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    p.factors.emplace_back(sorted[i], static_cast<uint32_t>(j - i));
    i = j;
  }
  return p;
}

CovarianceModel CovarianceModel::identity(Eigen::Index n) {
  return scaled_identity(n, 1.0);
}

CovarianceModel CovarianceModel::scaled_identity(Eigen::Index n, double value) {
  if (value < 0.0)
    throw std::invalid_argument("scaled_identity: negative variance");
  CovarianceModel m;
  m.sigma = Eigen::MatrixXd::Identity(n, n) * value;
  m.factor = Eigen::MatrixXd::Identity(n, n) * std::sqrt(value);
  return m;
}

CovarianceModel CovarianceModel::from_matrix(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("from_matrix: matrix must be square");
  CovarianceModel m;
  Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());

  bool diagonal = true;
  for (Eigen::Index i = 0; i < sym.rows() && diagonal; ++i)
    for (Eigen::Index j = 0; j < sym.cols(); ++j)
      if (i != j && sym(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    double worst = 0.0;
    Eigen::MatrixXd root = Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
    for (Eigen::Index i = 0; i < sym.rows(); ++i) {
      double d = sym(i, i);
      if (d < 0.0) {
        worst = std::max(worst, -d);
        d = 0.0;
        sym(i, i) = 0.0;
      }
      root(i, i) = std::sqrt(d);
    }
    m.sigma = std::move(sym);
    m.factor = std::move(root);
    m.repair_magnitude = worst;
    m.psd_repaired = worst > 1e-10;
    return m;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("from_matrix: eigendecomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues();
  const double min_eig = vals.minCoeff();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) < 0.0) vals(i) = 0.0;
  m.repair_magnitude = std::max(0.0, -min_eig);
  m.psd_repaired = min_eig < -1e-10;
  m.sigma = eig.eigenvectors() * vals.asDiagonal() *
            eig.eigenvectors().transpose();
  m.factor = eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
  return m;
}

uint64_t CovarianceModel::hash() const {
  std::ostringstream os;
  os << sigma.rows() << ":";
  os.precision(17);
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) os << sigma(i, j) << ",";
  return fnv1a64(os.str());
}

void CovarianceModel::write_csv(std::ostream& os) const {
  os << "dim," << sigma.rows() << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      if (j > 0) os << ",";
      os << sigma(i, j);
    }
    os << "\n";
  }
}

CovarianceModel build_covariance(const ProcessSpec& process,
                                 const BasisSpec& basis, uint32_t N, uint32_t L,
                                 CovarianceMode mode,
                                 std::size_t mc_path_length) {
  if (N == 0 || N > basis.max_index)
    throw std::invalid_argument("build_covariance: N must be in 1..max_index");
  const auto dim = static_cast<Eigen::Index>(N);

  if (mode == CovarianceMode::kAnalytic) {
    const uint32_t effective_lag =
        std::min<uint32_t>(L, mixing_profile(process).zero_from > 0
                                  ? mixing_profile(process).zero_from - 1
                                  : L);
    Eigen::MatrixXd sigma(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        const auto k = static_cast<uint32_t>(r) + 1;
        const auto l = static_cast<uint32_t>(c) + 1;
        double v = lag_moment(process, basis, k, l, 0);
        for (uint32_t j = 1; j <= effective_lag; ++j)
          v += lag_moment(process, basis, k, l, j) +
               lag_moment(process, basis, l, k, j);
        sigma(r, c) = v;
      }
    }
    return CovarianceModel::from_matrix(std::move(sigma));
  }

  if (mc_path_length < 100 * (L + 1))
    throw std::invalid_argument("build_covariance: MC path too short");
  const std::vector<double> x = sample_path(process, mc_path_length, 0);
  const std::size_t t_max = mc_path_length - L;
  std::vector<std::vector<double>> cols(N);
  for (uint32_t k = 1; k <= N; ++k) {
    cols[k - 1].resize(mc_path_length);
    for (std::size_t t = 0; t < mc_path_length; ++t)
      cols[k - 1][t] = eval_basis(basis, k, x[t]);
  }

  Eigen::MatrixXd sigma(dim, dim);
  Eigen::MatrixXd err(dim, dim);
  const std::size_t batches = 100;
  const std::size_t batch_len = t_max / batches;
  std::vector<double> zeta(t_max);
  std::vector<double> batch_mean(batches);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = r; c < dim; ++c) {
      const auto& ek = cols[static_cast<std::size_t>(r)];
      const auto& el = cols[static_cast<std::size_t>(c)];
      for (std::size_t t = 0; t < t_max; ++t) {
        double v = ek[t] * el[t];
        for (uint32_t j = 1; j <= L; ++j)
          v += ek[t] * el[t + j] + el[t] * ek[t + j];
        zeta[t] = v;
      }
      const double mean =
          pairwise_sum(zeta) / static_cast<double>(t_max);
      for (std::size_t b = 0; b < batches; ++b) {
        const std::span<const double> chunk(zeta.data() + b * batch_len,
                                            batch_len);
        batch_mean[b] = pairwise_sum(chunk) / static_cast<double>(batch_len);
      }
      double ss = 0.0;
      for (double bm : batch_mean) ss += (bm - mean) * (bm - mean);
      const double se = std::sqrt(
          ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
      sigma(r, c) = mean;
      sigma(c, r) = mean;
      err(r, c) = se;
      err(c, r) = se;
    }
  }
  CovarianceModel model = CovarianceModel::from_matrix(std::move(sigma));
  model.stderr_map = std::move(err);
  return model;
}

std::vector<double> sample_tau(const CovarianceModel& model,
                               uint64_t master_seed, uint64_t replicate_id) {
  const Eigen::Index d = model.dim();
  CounterRng rng(master_seed, replicate_id, RngStream::kGaussian);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.next_normal();

  bool identity_factor = true;
  for (Eigen::Index i = 0; i < d && identity_factor; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (model.factor(i, j) != (i == j ? 1.0 : 0.0)) {
        identity_factor = false;
        break;
      }
  std::vector<double> tau(static_cast<std::size_t>(d));
  if (identity_factor) {
    for (Eigen::Index i = 0; i < d; ++i)
      tau[static_cast<std::size_t>(i)] = z(i);
    return tau;
  }
  const Eigen::VectorXd t = model.factor * z;
  for (Eigen::Index i = 0; i < d; ++i)
    tau[static_cast<std::size_t>(i)] = t(i);
  return tau;
}

namespace {

void require_summable(const KernelSpec& kernel, const char* who) {
  if (!kernel.summable())
    throw std::domain_error(std::string(who) +
                            ": coefficients are not absolutely summable");
}

// coefficients sorted by ascending max component, lexicographic within a shell
std::vector<std::pair<MultiIndex, double>> shell_ordered_coeffs(
    const KernelSpec& kernel, uint32_t trunc) {
  std::vector<std::pair<MultiIndex, double>> out;
  kernel.for_each_coeff(
      trunc, [&](const MultiIndex& idx, double val) { out.emplace_back(idx, val); });
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) {
                     const uint32_t ma = *std::max_element(a.first.begin(),
                                                           a.first.end());
                     const uint32_t mb = *std::max_element(b.first.begin(),
                                                           b.first.end());
                     if (ma != mb) return ma < mb;
                     return a.first < b.first;
                   });
  return out;
}

void check_tau_dim(std::span<const double> tau, uint32_t trunc,
                   const char* who) {
  if (tau.size() < trunc)
    throw std::invalid_argument(std::string(who) +
                                ": tau shorter than the truncation");
}

}  // namespace

double limit_u_given_tau(const KernelSpec& kernel, std::span<const double> tau,
                         uint32_t trunc) {
  require_summable(kernel, "limit_u");
  check_tau_dim(tau, trunc, "limit_u");
  CascadeSum acc;
  for (const auto& [idx, val] : shell_ordered_coeffs(kernel, trunc)) {
    const MultiplicityProfile prof = multiplicity_profile(idx);
    double term = val;
    for (const auto& [index, mult] : prof.factors) {
      if (index == 0)
        throw std::domain_error("limit_u: kernel couples the constant e_0");
      term *= hermite(mult, tau[index - 1]);
    }
    acc.add(term);
  }
  return acc.total();
}

double limit_v_given_tau(const KernelSpec& kernel, std::span<const double> tau,
                         uint32_t trunc) {
  require_summable(kernel, "limit_v");
  check_tau_dim(tau, trunc, "limit_v");
  CascadeSum acc;
  for (const auto& [idx, val] : shell_ordered_coeffs(kernel, trunc)) {
    double term = val;
    for (uint32_t component : idx) {
      if (component == 0)
        throw std::domain_error("limit_v: kernel couples the constant e_0");
      term *= tau[component - 1];
    }
    acc.add(term);
  }
  return acc.total();
}

double limit_u_sample(const KernelSpec& kernel, const CovarianceModel& model,
                      uint32_t trunc, uint64_t master_seed,
                      uint64_t replicate_id) {
  if (model.dim() < static_cast<Eigen::Index>(trunc))
    throw std::invalid_argument("limit_u_sample: model smaller than trunc");
  const std::vector<double> tau = sample_tau(model, master_seed, replicate_id);
  return limit_u_given_tau(kernel, tau, trunc);
}

double limit_v_sample(const KernelSpec& kernel, const CovarianceModel& model,
                      uint32_t trunc, uint64_t master_seed,
                      uint64_t replicate_id) {
  if (model.dim() < static_cast<Eigen::Index>(trunc))
    throw std::invalid_argument("limit_v_sample: model smaller than trunc");
  const std::vector<double> tau = sample_tau(model, master_seed, replicate_id);
  return limit_v_given_tau(kernel, tau, trunc);
}

double centered_quadratic_sample(const KernelSpec& kernel,
                                 const CovarianceModel& model, uint32_t trunc,
                                 uint64_t master_seed, uint64_t replicate_id) {
  if (!kernel.is_eigen() || kernel.order != 2)
    throw std::invalid_argument(
        "centered_quadratic_sample: order-2 eigen-series kernel required");
  if (model.dim() < static_cast<Eigen::Index>(trunc))
    throw std::invalid_argument(
        "centered_quadratic_sample: model smaller than trunc");
  const std::vector<double> tau = sample_tau(model, master_seed, replicate_id);
  CascadeSum acc;
  for (uint32_t k = 1; k <= trunc; ++k) {
    const double t = tau[k - 1];
    const double variance = model.sigma(k - 1, k - 1);
    acc.add(kernel.eigen->lambda(k) * (t * t - variance));
  }
  return acc.total();
}

double prop2_limit_sample(const KernelSpec& kernel,
                          const CovarianceModel& model, uint32_t trunc,
                          uint64_t master_seed, uint64_t replicate_id) {
  require_summable(kernel, "prop2_limit_sample");
  const double offset = 0.5 * diagonal_expectation(kernel, trunc);
  return offset +
         centered_quadratic_sample(kernel, model, trunc, master_seed,
                                   replicate_id);
}

double claimed_quadratic_sample(const KernelSpec& kernel,
                                const CovarianceModel& model, uint32_t trunc,
                                uint64_t master_seed, uint64_t replicate_id) {
  if (!kernel.is_eigen() || kernel.order != 2)
    throw std::invalid_argument(
        "claimed_quadratic_sample: order-2 eigen-series kernel required");
  require_summable(kernel, "claimed_quadratic_sample");
  if (model.dim() < static_cast<Eigen::Index>(trunc))
    throw std::invalid_argument(
        "claimed_quadratic_sample: model smaller than trunc");
  const std::vector<double> tau = sample_tau(model, master_seed, replicate_id);
  CascadeSum acc;
  for (uint32_t k = 1; k <= trunc; ++k) {
    const double t = tau[k - 1];
    acc.add(kernel.eigen->lambda(k) * (t * t - 1.0));
  }
  return acc.total();
}

DivergenceStudy prop4_divergence_stat(const KernelSpec& kernel,
                                      const ProcessSpec& process,
                                      std::span<const std::size_t> n_grid,
                                      std::size_t replicates, unsigned workers) {
  if (kernel.order != 2)
    throw std::invalid_argument("prop4_divergence_stat: order 2 only");
  if (replicates == 0)
    throw std::invalid_argument("prop4_divergence_stat: replicates >= 1");
  DivergenceStudy study;
  study.diagonal_mean_finite = kernel.summable();
  const uint32_t trunc = kernel.basis.max_index;
  for (const std::size_t n : n_grid) {
    std::vector<double> diag(replicates), off(replicates), u(replicates);
    parallel_for(replicates, workers, [&](std::size_t r) {
      const std::vector<double> path = sample_path(process, n, r);
      diag[r] = adjacent_diagonal_average(kernel, path, trunc);
      off[r] = u_stat_offdiagonal(kernel, path, trunc);
      u[r] = diag[r] + off[r];
    });
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    study.rows.push_back({n, median(u), median(diag)});
    study.u_samples.push_back(std::move(u));
    study.diag_samples.push_back(std::move(diag));
    study.offdiag_samples.push_back(std::move(off));
  }
  return study;
}

}  // namespace uvstat
