#include "uvstat/ustat_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uvstat/common.hpp"

namespace uvstat {
namespace {

long long block_weight(std::size_t size) {
  // (-1)^{b-1} (b-1)!
  long long w = 1;
  for (std::size_t r = 2; r < size; ++r) w *= static_cast<long long>(r);
  return (size % 2 == 0) ? -w : w;
}

void size_guard(std::size_t n, uint32_t m) {
  double total = 1.0;
  for (uint32_t j = 0; j < m; ++j) total *= static_cast<double>(n);
  if (total > 1e8)
    throw std::invalid_argument(
        "naive statistic: n^m exceeds 1e8, use the factored evaluator");
}

double normalization(std::size_t n, uint32_t m) {
  return std::pow(static_cast<double>(n), -0.5 * static_cast<double>(m));
}

// visits every m-tuple over {0..n-1}; pred filters index patterns
template <typename Visit>
void for_each_tuple(std::size_t n, uint32_t m, Visit&& visit) {
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    visit(idx);
    uint32_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
  }
}

bool pairwise_distinct(const std::vector<std::size_t>& idx) {
  for (std::size_t a = 0; a + 1 < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] == idx[b]) return false;
  return true;
}

}  // namespace

std::vector<PartitionTerm> enumerate_partitions(uint32_t m) {
  if (m == 0 || m > 6)
    throw std::invalid_argument("enumerate_partitions: m must be in 1..6");
  // restricted growth strings: a[0]=0, a[i] <= 1 + max(a[0..i-1])
  std::vector<PartitionTerm> out;
  std::vector<uint32_t> a(m, 0);
  for (;;) {
    const uint32_t nblocks = *std::max_element(a.begin(), a.end()) + 1;
    PartitionTerm term;
    term.blocks.assign(nblocks, {});
    for (uint32_t i = 0; i < m; ++i) term.blocks[a[i]].push_back(i);
    term.weight = 1;
    for (const auto& b : term.blocks) term.weight *= block_weight(b.size());
    out.push_back(std::move(term));

    uint32_t pos = m;
    bool advanced = false;
    while (pos > 1) {
      --pos;
      uint32_t cap = 0;
      for (uint32_t i = 0; i < pos; ++i) cap = std::max(cap, a[i]);
      if (a[pos] <= cap) {
        ++a[pos];
        std::fill(a.begin() + pos + 1, a.end(), 0);
        advanced = true;
        break;
      }
      a[pos] = 0;
    }
    if (!advanced) return out;
  }
}

PowerSumTable::PowerSumTable(const BasisSpec& basis,
                             std::span<const double> path)
    : basis_(basis), path_(path) {}

const std::vector<double>& PowerSumTable::basis_column(uint32_t k) {
  auto it = columns_.find(k);
  if (it != columns_.end()) return it->second;
  std::vector<double> col(path_.size());
  for (std::size_t j = 0; j < path_.size(); ++j)
    col[j] = eval_basis(basis_, k, path_[j]);
  return columns_.emplace(k, std::move(col)).first->second;
}

double PowerSumTable::normalized_power_sum(const MultiIndex& sorted_block) {
  auto it = power_memo_.find(sorted_block);
  if (it != power_memo_.end()) return it->second;
  const std::size_t n = path_.size();
  double raw;
  if (sorted_block.size() == 1) {
    raw = pairwise_sum(basis_column(sorted_block[0]));
  } else {
    std::vector<double> prod(basis_column(sorted_block[0]));
    for (std::size_t b = 1; b < sorted_block.size(); ++b) {
      const auto& col = basis_column(sorted_block[b]);
      for (std::size_t j = 0; j < n; ++j) prod[j] *= col[j];
    }
    raw = pairwise_sum(prod);
  }
  const double value =
      raw * std::pow(static_cast<double>(n),
                     -0.5 * static_cast<double>(sorted_block.size()));
  power_memo_.emplace(sorted_block, value);
  return value;
}

double PowerSumTable::normalized_adjacent_sum(uint32_t k, uint32_t l) {
  const auto key = std::make_pair(k, l);
  auto it = adjacent_memo_.find(key);
  if (it != adjacent_memo_.end()) return it->second;
  const auto& ck = basis_column(k);
  const auto& cl = basis_column(l);
  const std::size_t n = path_.size();
  std::vector<double> prod(n > 0 ? n - 1 : 0);
  for (std::size_t j = 0; j + 1 < n; ++j) prod[j] = ck[j] * cl[j + 1];
  const double value = pairwise_sum(prod) / static_cast<double>(n);
  adjacent_memo_.emplace(key, value);
  return value;
}

double v_stat_naive(const KernelSpec& kernel, std::span<const double> path) {
  const std::size_t n = path.size();
  size_guard(n, kernel.order);
  const uint32_t trunc = kernel.basis.max_index;
  std::vector<double> pts(kernel.order);
  CascadeSum acc;
  for_each_tuple(n, kernel.order, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t j = 0; j < idx.size(); ++j) pts[j] = path[idx[j]];
    acc.add(eval_kernel(kernel, pts, trunc));
  });
  return acc.total() * normalization(n, kernel.order);
}

double u_stat_naive(const KernelSpec& kernel, std::span<const double> path) {
  const std::size_t n = path.size();
  if (n < kernel.order) return 0.0;
  size_guard(n, kernel.order);
  const uint32_t trunc = kernel.basis.max_index;
  std::vector<double> pts(kernel.order);
  CascadeSum acc;
  for_each_tuple(n, kernel.order, [&](const std::vector<std::size_t>& idx) {
    if (!pairwise_distinct(idx)) return;
    for (std::size_t j = 0; j < idx.size(); ++j) pts[j] = path[idx[j]];
    acc.add(eval_kernel(kernel, pts, trunc));
  });
  return acc.total() * normalization(n, kernel.order);
}

double u0_stat_naive(const KernelSpec& kernel, std::span<const double> path,
                     bool auto_symmetrize) {
  KernelSpec f0 = kernel;
  if (!is_symmetric(kernel)) {
    if (!auto_symmetrize)
      throw std::invalid_argument(
          "u0_stat_naive: kernel is not symmetric (pass auto_symmetrize to "
          "use symmetrize(f) as f0)");
    f0 = symmetrize(kernel);
  }
  const std::size_t n = path.size();
  const uint32_t m = f0.order;
  if (n < m) return 0.0;
  size_guard(n, m);
  const uint32_t trunc = f0.basis.max_index;
  std::vector<std::size_t> idx(m);
  for (uint32_t j = 0; j < m; ++j) idx[j] = j;
  std::vector<double> pts(m);
  CascadeSum acc;
  for (;;) {
    for (std::size_t j = 0; j < m; ++j) pts[j] = path[idx[j]];
    acc.add(eval_kernel(f0, pts, trunc));
    // next strictly increasing tuple
    uint32_t pos = m;
    bool advanced = false;
    while (pos > 0) {
      --pos;
      if (idx[pos] + (m - pos) < n) {
        ++idx[pos];
        for (uint32_t q = pos + 1; q < m; ++q) idx[q] = idx[q - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return acc.total() * normalization(n, m);
}

namespace {

// sum over distinct tuples of the series kernel, via the partition identity
double u_series_factored(const KernelSpec& kernel, PowerSumTable& table,
                         uint32_t trunc) {
  const auto parts = enumerate_partitions(kernel.order);
  CascadeSum acc;
  MultiIndex block;
  kernel.for_each_coeff(trunc, [&](const MultiIndex& idx, double val) {
    double partition_sum = 0.0;
    for (const PartitionTerm& p : parts) {
      double prod = static_cast<double>(p.weight);
      for (const auto& positions : p.blocks) {
        block.clear();
        for (uint32_t pos : positions) block.push_back(idx[pos]);
        std::sort(block.begin(), block.end());
        prod *= table.normalized_power_sum(block);
      }
      partition_sum += prod;
    }
    acc.add(val * partition_sum);
  });
  return acc.total();
}

// 2/n sum over adjacent coincidences of (override - series diagonal); the
// exact gap between the series distinct-sum and the override kernel's
// distinct-sum when coincidences are adjacent-only
double adjacent_override_correction(const KernelSpec& kernel,
                                    std::span<const double> path,
                                    uint32_t trunc) {
  const double ov = *kernel.diagonal_value;
  const std::size_t n = path.size();
  CascadeSum corr;
  std::vector<double> pts(2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (path[i] != path[i + 1]) continue;
    pts[0] = pts[1] = path[i];
    corr.add(2.0 * (ov - eval_kernel_series(kernel, pts, trunc)));
  }
  return corr.total() / static_cast<double>(n);
}

}  // namespace

double u_stat_factored(const KernelSpec& kernel, std::span<const double> path,
                       uint32_t trunc) {
  if (path.size() < kernel.order) return 0.0;
  PowerSumTable table(kernel.basis, path);
  double value = u_series_factored(kernel, table, trunc);
  if (kernel.diagonal_value) {
    if (kernel.order != 2)
      throw std::invalid_argument(
          "u_stat_factored: diagonal override supported for order 2 only");
    value += adjacent_override_correction(kernel, path, trunc);
  }
  return value;
}

double v_stat_factored(const KernelSpec& kernel, std::span<const double> path,
                       uint32_t trunc) {
  if (kernel.diagonal_value) {
    if (kernel.order != 2)
      throw std::invalid_argument(
          "v_stat_factored: diagonal override supported for order 2 only");
    // diagonal tuples all evaluate to the override: V = U + n^-1 * n * ov
    return u_stat_factored(kernel, path, trunc) + *kernel.diagonal_value;
  }
  PowerSumTable table(kernel.basis, path);
  CascadeSum acc;
  MultiIndex single(1);
  kernel.for_each_coeff(trunc, [&](const MultiIndex& idx, double val) {
    double prod = val;
    for (uint32_t component : idx) {
      single[0] = component;
      prod *= table.normalized_power_sum(single);
    }
    acc.add(prod);
  });
  return acc.total();
}

double adjacent_diagonal_average(const KernelSpec& kernel,
                                 std::span<const double> path, uint32_t trunc) {
  if (kernel.order != 2)
    throw std::invalid_argument("adjacent_diagonal_average: order 2 only");
  const std::size_t n = path.size();
  if (n < 2) return 0.0;
  std::vector<double> terms(n - 1);
  std::vector<double> pts(2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pts[0] = path[i];
    pts[1] = path[i + 1];
    terms[i] = eval_kernel(kernel, pts, trunc);
  }
  return 2.0 * pairwise_sum(terms) / static_cast<double>(n);
}

double u_stat_offdiagonal(const KernelSpec& kernel,
                          std::span<const double> path, uint32_t trunc) {
  if (kernel.order != 2)
    throw std::invalid_argument("u_stat_offdiagonal: order 2 only");
  if (path.size() < 3) return 0.0;
  PowerSumTable table(kernel.basis, path);
  CascadeSum acc;
  MultiIndex a(1), b(1), pair(2);
  kernel.for_each_coeff(trunc, [&](const MultiIndex& idx, double val) {
    a[0] = idx[0];
    b[0] = idx[1];
    pair[0] = std::min(idx[0], idx[1]);
    pair[1] = std::max(idx[0], idx[1]);
    const double term = table.normalized_power_sum(a) *
                            table.normalized_power_sum(b) -
                        table.normalized_power_sum(pair) -
                        table.normalized_adjacent_sum(idx[0], idx[1]) -
                        table.normalized_adjacent_sum(idx[1], idx[0]);
    acc.add(val * term);
  });
  return acc.total();
}

}  // namespace uvstat
