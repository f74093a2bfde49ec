#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uvstat {

// FNV-1a 64-bit. Used to fingerprint configs and specs; the hash is embedded
// in every output artifact so results can be traced back to their inputs.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(uint64_t value);

// Pairwise (cascade) summation over a contiguous block. Error grows like
// O(log n) in the term count, which matters for the cancellation-heavy
// sinusoid sums in the statistic evaluators.
double pairwise_sum(std::span<const double> values);

// Streaming variant with O(log n) memory: partial sums are merged like the
// carries of a binary counter, so the result equals a fixed summation tree
// and is independent of how callers chunk the input.
class CascadeSum {
 public:
  void add(double x);
  double total() const;
  void reset();

 private:
  std::vector<double> levels_;
  std::vector<bool> occupied_;
};

// Runs fn(i) for each i in [0, count) on `workers` threads. Indices are
// handed out through an atomic counter; each index is processed exactly
// once and callers write to disjoint per-index slots, so results do not
// depend on the schedule or the worker count.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace uvstat
