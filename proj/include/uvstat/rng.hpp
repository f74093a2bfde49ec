#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace uvstat {

// Named substreams. Every consumer draws from its own keyed stream, so adding
// draws in one place never perturbs another, and replicates can be generated
// in any order or in parallel with identical results.
enum class RngStream : uint64_t {
  kMarginal = 1,    // innovation draws Y_i
  kShift = 2,       // Bernoulli shift indicators
  kGaussian = 3,    // Gaussian vectors for the limit laws
  kDegeneracy = 4,  // Monte Carlo draws of the canonicity check
  kSubsample = 5,   // subsampling inside the distance diagnostics
  kGeneric = 6,
};

// Counter-based generator: output i is a 64-bit finalizer applied to
// key ^ (i * golden), with the key derived from (master seed, replicate id,
// stream). Stateless across replicates by construction.
class CounterRng {
 public:
  CounterRng(uint64_t master_seed, uint64_t replicate_id, RngStream stream)
      : key_(derive_key(master_seed, replicate_id,
                        static_cast<uint64_t>(stream))) {}

  uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return mix(key_ ^ counter_);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [-1,1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  // Standard normal, Box-Muller; the second member of each pair is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = next_unit();
    if (u < 0x1.0p-53) u = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * next_unit();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Geometric(1/2) on {1, 2, ...}: the position of the first set bit of one
  // word has exactly the halving distribution (capped at 64, mass 2^-64).
  int next_geometric_halving() {
    const uint64_t v = next_u64();
    return v == 0 ? 64 : std::countl_zero(v) + 1;
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  static uint64_t derive_key(uint64_t seed, uint64_t replicate, uint64_t stream) {
    uint64_t k = mix(seed + 0x9E3779B97F4A7C15ull);
    k = mix(k ^ (replicate + 0xBF58476D1CE4E5B9ull));
    k = mix(k ^ (stream + 0x94D049BB133111EBull));
    return k;
  }

  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace uvstat
