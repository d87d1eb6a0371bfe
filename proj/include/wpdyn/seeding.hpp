// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wpdyn {

/// Identifies one stochastic realization inside an ensemble.
struct SeedPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

namespace detail {
// SplitMix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based stream seed: distinct realization indices map to distinct
/// seeds for any fixed master seed, independent of evaluation order, and the
/// value is identical on every platform.
inline std::uint64_t derive_stream_seed(const SeedPolicy& policy) {
  return detail::splitmix64(policy.master_seed ^ detail::splitmix64(policy.realization_index));
}

/// mt19937_64 with hand-rolled variate transforms. The standard pins the
/// generator's output sequence but not the distribution adaptors, so the
/// transforms live here to keep streams bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  explicit Rng(const SeedPolicy& policy) : gen_(derive_stream_seed(policy)) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given mean (inverse-CDF transform).
  double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wpdyn
