#include "uvstat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uvstat/common.hpp"
#include "uvstat/rng.hpp"

namespace uvstat {

EigenSeries EigenSeries::wiener() {
  return {EigenFormula::kWienerInverseSquare, {}, true};
}

EigenSeries EigenSeries::one_over_k() {
  return {EigenFormula::kOneOverK, {}, false};
}

EigenSeries EigenSeries::list(std::vector<double> values) {
  return {EigenFormula::kList, std::move(values), true};
}

double EigenSeries::lambda(uint32_t k) const {
  if (k == 0) throw std::out_of_range("EigenSeries::lambda: k starts at 1");
  switch (formula) {
    case EigenFormula::kWienerInverseSquare: {
      const double w = std::numbers::pi * (k - 0.5);
      return 1.0 / (w * w);
    }
    case EigenFormula::kOneOverK:
      return 1.0 / static_cast<double>(k);
    case EigenFormula::kList:
      return k <= values.size() ? values[k - 1] : 0.0;
  }
  return 0.0;
}

double EigenSeries::partial_sum(uint32_t upto) const {
  CascadeSum acc;
  const uint32_t stop =
      formula == EigenFormula::kList
          ? std::min<uint32_t>(upto, static_cast<uint32_t>(values.size()))
          : upto;
  for (uint32_t k = 1; k <= stop; ++k) acc.add(lambda(k));
  return acc.total();
}

double EigenSeries::tail_sum(uint32_t after) const {
  switch (formula) {
    case EigenFormula::kWienerInverseSquare: {
      // exact head, then sum_{k>K} (pi(k-1/2))^-2 ~ int_{K+1/2-1/2} = 1/(pi^2 K)
      const uint32_t head = 20000;
      CascadeSum acc;
      for (uint32_t k = after + 1; k <= after + head; ++k) acc.add(lambda(k));
      const double remainder =
          1.0 / (std::numbers::pi * std::numbers::pi * (after + head));
      return acc.total() + remainder;
    }
    case EigenFormula::kOneOverK:
      return std::numeric_limits<double>::infinity();
    case EigenFormula::kList: {
      CascadeSum acc;
      for (uint32_t k = after + 1; k <= values.size(); ++k)
        acc.add(std::abs(lambda(k)));
      return acc.total();
    }
  }
  return 0.0;
}

std::string EigenSeries::describe() const {
  switch (formula) {
    case EigenFormula::kWienerInverseSquare:
      return "wiener";
    case EigenFormula::kOneOverK:
      return "one_over_k";
    case EigenFormula::kList:
      return "list(" + std::to_string(values.size()) + ")";
  }
  return "?";
}

KernelSpec KernelSpec::tensor(BasisSpec basis, uint32_t order,
                              std::map<MultiIndex, double> coeffs) {
  if (order == 0) throw std::invalid_argument("KernelSpec: order must be >= 1");
  for (const auto& [idx, val] : coeffs) {
    (void)val;
    if (idx.size() != order)
      throw std::invalid_argument("KernelSpec: multi-index length != order");
    for (uint32_t c : idx)
      if (c > basis.max_index)
        throw std::out_of_range("KernelSpec: index beyond basis max_index");
  }
  KernelSpec s;
  s.order = order;
  s.basis = basis;
  s.coeffs = std::move(coeffs);
  return s;
}

KernelSpec KernelSpec::eigen_diagonal(BasisSpec basis, EigenSeries series,
                                      uint32_t order) {
  if (order == 0) throw std::invalid_argument("KernelSpec: order must be >= 1");
  KernelSpec s;
  s.order = order;
  s.basis = basis;
  s.eigen = std::move(series);
  return s;
}

KernelSpec KernelSpec::with_diagonal(double value) const {
  if (basis.marginal.is_discrete())
    throw std::invalid_argument(
        "with_diagonal: override requires a continuous marginal");
  KernelSpec s = *this;
  s.diagonal_value = value;
  return s;
}

void KernelSpec::for_each_coeff(
    uint32_t trunc,
    const std::function<void(const MultiIndex&, double)>& fn) const {
  if (eigen) {
    MultiIndex idx(order, 0);
    for (uint32_t k = 1; k <= trunc; ++k) {
      const double l = eigen->lambda(k);
      if (l == 0.0) continue;
      std::fill(idx.begin(), idx.end(), k);
      fn(idx, l);
    }
    return;
  }
  for (const auto& [idx, val] : coeffs) {
    if (std::ranges::max(idx) > trunc) continue;
    fn(idx, val);
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os << "order-" << order << " ";
  if (eigen) {
    os << "eigen(" << eigen->describe() << ")";
  } else {
    os << "tensor(" << coeffs.size() << " coeffs";
    for (const auto& [idx, val] : coeffs) {
      os << ";";
      for (uint32_t c : idx) os << " " << c;
      os << " -> " << val;
    }
    os << ")";
  }
  os << " over " << basis.describe();
  if (diagonal_value) os << " diag=" << *diagonal_value;
  return os.str();
}

uint64_t KernelSpec::hash() const { return fnv1a64(describe()); }

namespace {

bool all_equal(std::span<const double> points) {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i] != points[0]) return false;
  return true;
}

double series_value(const KernelSpec& spec, std::span<const double> points,
                    uint32_t trunc) {
  // cache e_k(t_j) columns so eigen series cost N*m, not N*m per term
  const std::size_t m = points.size();
  std::vector<std::vector<double>> cache(m);
  auto basis_at = [&](std::size_t j, uint32_t k) {
    auto& col = cache[j];
    while (col.size() <= k)
      col.push_back(eval_basis(spec.basis, static_cast<uint32_t>(col.size()),
                               points[j]));
    return col[k];
  };
  CascadeSum acc;
  spec.for_each_coeff(trunc, [&](const MultiIndex& idx, double val) {
    double term = val;
    for (std::size_t j = 0; j < m; ++j) term *= basis_at(j, idx[j]);
    acc.add(term);
  });
  return acc.total();
}

}  // namespace

double eval_kernel_series(const KernelSpec& spec, std::span<const double> points,
                          uint32_t trunc) {
  if (points.size() != spec.order)
    throw std::invalid_argument("eval_kernel: wrong number of points");
  for (double t : points)
    if (!spec.basis.marginal.contains(t))
      throw std::domain_error("eval_kernel: point outside marginal support");
  return series_value(spec, points, trunc);
}

double eval_kernel(const KernelSpec& spec, std::span<const double> points,
                   uint32_t trunc) {
  if (spec.diagonal_value && points.size() == spec.order && all_equal(points))
    return *spec.diagonal_value;
  return eval_kernel_series(spec, points, trunc);
}

double degeneracy_defect(const KernelSpec& spec, uint32_t slot,
                         std::size_t mc_size, uint64_t seed) {
  if (slot == 0 || slot > spec.order)
    throw std::out_of_range("degeneracy_defect: slot must be in 1..m");
  if (mc_size == 0)
    throw std::invalid_argument("degeneracy_defect: mc_size must be >= 1");
  const uint32_t trunc = spec.basis.max_index;
  CounterRng rng(seed, 0, RngStream::kDegeneracy);
  const MarginalLaw& law = spec.basis.marginal;
  std::vector<double> pts(spec.order);
  CascadeSum acc;
  for (std::size_t r = 0; r < mc_size; ++r) {
    for (std::size_t j = 0; j < spec.order; ++j) pts[j] = law.sample(rng);
    // conditional expectation over the slot, the rest held fixed
    const double inner = law.expectation([&](double u) {
      std::vector<double> q(pts);
      q[slot - 1] = u;
      return eval_kernel(spec, q, trunc);
    });
    acc.add(inner * inner);
  }
  return acc.total() / static_cast<double>(mc_size);
}

KernelSpec symmetrize(const KernelSpec& spec) {
  if (spec.order > 6)
    throw std::invalid_argument("symmetrize: order > 6 not supported");
  if (spec.eigen) {
    // diagonal multi-indices are permutation invariant: f_0 = m! f
    KernelSpec out = spec;
    std::vector<double> scaled;
    double fact = 1.0;
    for (uint32_t r = 2; r <= spec.order; ++r) fact *= r;
    const uint32_t upto = spec.basis.max_index;
    scaled.reserve(upto);
    for (uint32_t k = 1; k <= upto; ++k)
      scaled.push_back(fact * spec.eigen->lambda(k));
    out.eigen = EigenSeries::list(std::move(scaled));
    out.eigen->summable = spec.eigen->summable;
    return out;
  }
  std::map<MultiIndex, double> out;
  std::vector<std::size_t> perm(spec.order);
  for (const auto& [idx, val] : spec.coeffs) {
    for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
    do {
      MultiIndex permuted(spec.order);
      for (std::size_t j = 0; j < perm.size(); ++j) permuted[j] = idx[perm[j]];
      out[permuted] += val;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  KernelSpec s = spec;
  s.coeffs = std::move(out);
  return s;
}

bool is_symmetric(const KernelSpec& spec) {
  if (spec.eigen) return true;
  std::vector<std::size_t> perm(spec.order);
  for (const auto& [idx, val] : spec.coeffs) {
    for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
    do {
      MultiIndex permuted(spec.order);
      for (std::size_t j = 0; j < perm.size(); ++j) permuted[j] = idx[perm[j]];
      const auto it = spec.coeffs.find(permuted);
      if (it == spec.coeffs.end() || it->second != val) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

double tail_mass(const KernelSpec& spec, uint32_t trunc) {
  if (spec.eigen) {
    if (!spec.eigen->summable)
      return std::numeric_limits<double>::infinity();
    return spec.eigen->tail_sum(trunc);
  }
  CascadeSum acc;
  for (const auto& [idx, val] : spec.coeffs)
    if (std::ranges::max(idx) > trunc) acc.add(std::abs(val));
  return acc.total();
}

double diagonal_expectation(const KernelSpec& spec, uint32_t trunc) {
  if (spec.diagonal_value) return *spec.diagonal_value;
  if (spec.eigen && spec.order == 2) return spec.eigen->partial_sum(trunc);
  return spec.basis.marginal.expectation([&](double t) {
    std::vector<double> pts(spec.order, t);
    return eval_kernel_series(spec, pts, trunc);
  });
}

double signed_min_kernel(double t, double s) {
  const double sign = (t >= 0.0 ? 1.0 : -1.0) * (s >= 0.0 ? 1.0 : -1.0);
  return (t == 0.0 || s == 0.0)
             ? 0.0
             : sign * std::min(std::abs(t), std::abs(s));
}

}  // namespace uvstat
