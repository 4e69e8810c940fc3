#pragma once

#include <cstdint>

namespace rcqkd {

// splitmix64 finalizer: a bijection on 64-bit words with good avalanche.
std::uint64_t mix64(std::uint64_t z);

// Seed for logical stream `stream` under `master`. mix64 is a bijection and
// the golden-ratio multiplier is odd, so distinct streams never collide for
// a fixed master.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream);

// xoshiro256++ with splitmix64 state expansion. Pure integer core, so the
// same seed yields the same words on every platform. Gaussian variates go
// through the fixed rational quantile (inv_norm_cdf), never Box-Muller, so
// those are reproducible too.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  // Uniform on (0,1): 53-bit mantissa, offset half a ulp so 0 and 1 are
  // unreachable (the quantile function rejects both endpoints).
  double uniform01();

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, bound) by top-bits rejection; exact for any bound.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
};

} // namespace rcqkd
