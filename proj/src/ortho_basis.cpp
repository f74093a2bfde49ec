#include "uvstat/ortho_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uvstat/common.hpp"
#include "uvstat/quadrature.hpp"

namespace uvstat {

bool MarginalLaw::contains(double t) const {
  if (id == MarginalId::kUniformSymmetric) return t >= -1.0 && t <= 1.0;
  return t != 0.0 && std::isfinite(t) && t == std::round(t);
}

double MarginalLaw::expectation(const std::function<double(double)>& g,
                                double quad_tol) const {
  if (id == MarginalId::kUniformSymmetric) {
    return integrate_or_throw([&](double t) { return 0.5 * g(t); }, -1.0, 1.0,
                              quad_tol);
  }
  // mass 2^{-k-1} at +-k; beyond k = 64 the remaining mass is below 2^-64,
  // negligible for the bounded or finitely supported integrands used here
  CascadeSum acc;
  for (int k = 1; k <= 64; ++k) {
    const double mass = std::exp2(-static_cast<double>(k) - 1.0);
    acc.add(mass * g(static_cast<double>(k)));
    acc.add(mass * g(static_cast<double>(-k)));
  }
  return acc.total();
}

double MarginalLaw::sample(CounterRng& rng) const {
  if (id == MarginalId::kUniformSymmetric) return rng.next_symmetric();
  const double k = rng.next_geometric_halving();
  return rng.next_bit() ? k : -k;
}

std::string MarginalLaw::describe() const {
  return id == MarginalId::kUniformSymmetric ? "uniform_symmetric"
                                             : "signed_geometric";
}

BasisSpec BasisSpec::sine_wiener(uint32_t max_index) {
  return {BasisFamily::kSineWiener, MarginalLaw::uniform_symmetric(), max_index};
}

BasisSpec BasisSpec::discrete_signed(uint32_t max_index) {
  return {BasisFamily::kDiscreteSigned, MarginalLaw::signed_geometric(), max_index};
}

std::string BasisSpec::describe() const {
  const char* name =
      family == BasisFamily::kSineWiener ? "sine_wiener" : "discrete_signed";
  return std::string(name) + "(max=" + std::to_string(max_index) + ") over " +
         marginal.describe();
}

uint64_t BasisSpec::hash() const { return fnv1a64(describe()); }

double eval_basis(const BasisSpec& spec, uint32_t k, double t) {
  if (k > spec.max_index)
    throw std::out_of_range("eval_basis: index " + std::to_string(k) +
                            " exceeds max_index " +
                            std::to_string(spec.max_index));
  if (!spec.marginal.contains(t))
    throw std::domain_error("eval_basis: point outside the marginal support");
  if (k == 0) return 1.0;
  if (spec.family == BasisFamily::kSineWiener) {
    return std::numbers::sqrt2 *
           std::sin(std::numbers::pi * (k - 0.5) * t);
  }
  const double mag = std::abs(t);
  if (mag != static_cast<double>(k)) return 0.0;
  return (t > 0.0 ? 1.0 : -1.0) * std::exp2(0.5 * k);
}

Eigen::MatrixXd gram_matrix(const BasisSpec& spec, uint32_t upto,
                            double quad_tol) {
  if (upto > spec.max_index)
    throw std::out_of_range("gram_matrix: upto exceeds max_index");
  const auto d = static_cast<Eigen::Index>(upto) + 1;
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j; k < d; ++k) {
      const auto ju = static_cast<uint32_t>(j);
      const auto ku = static_cast<uint32_t>(k);
      const double v = spec.marginal.expectation(
          [&](double t) {
            return eval_basis(spec, ju, t) * eval_basis(spec, ku, t);
          },
          quad_tol);
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

OrthonormalityReport check_orthonormal(const BasisSpec& spec, uint32_t upto,
                                       double tol) {
  const Eigen::MatrixXd g = gram_matrix(spec, upto);
  const auto d = g.rows();
  double dev = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      dev = std::max(dev, std::abs(g(j, k) - (j == k ? 1.0 : 0.0)));
  return {upto, tol, dev, dev <= tol};
}

}  // namespace uvstat
