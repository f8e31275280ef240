#pragma once

#include <cstdint>

namespace atomflow {

// xoshiro256++ seeded through splitmix64. All distributions are implemented
// here rather than through <random> so that sampled trajectories are
// bit-reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi);
  // Standard normal (Box-Muller, pairs cached).
  double gaussian();
  // Standard Gumbel: -log(-log(U)) with U clamped to [eps, 1-eps].
  double gumbel(double eps = 1e-8);

  // Independent child stream; deterministic in (parent seed, stream id).
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  bool have_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace atomflow
