#pragma once

#include <cstdint>

namespace lci {

// xoshiro256++ with splitmix64 seeding. Self-contained so that seeded runs
// are reproducible across platforms and standard-library versions; every
// random draw in the toolkit goes through this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  double uniform(double lo, double hi);

  // Uniform integer in [0, n), unbiased (Lemire reduction).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; draws are consumed in pairs.
  double normal();

  double normal(double mean, double stddev);

  // Child generator derived from the construction seed and a stream id.
  // Independent of how many draws this generator has produced.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// splitmix64 mixing step; also used to derive deterministic sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace lci
