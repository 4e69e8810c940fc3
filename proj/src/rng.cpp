#include "rcqkd/rng.hpp"

#include <stdexcept>

#include "rcqkd/math_util.hpp"

namespace rcqkd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
} // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ (kGolden * (stream + 1)));
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  // splitmix64 sequence; also guards against the all-zero state.
  std::uint64_t z = seed;
  for (auto& w : s_) {
    z += kGolden;
    w = mix64(z);
  }
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform01() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256::normal() { return inv_norm_cdf(uniform01()); }

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Xoshiro256::below: bound == 0");
  if ((bound & (bound - 1)) == 0) {
    // Power of two: mask of the top bits (bottom bits of xoshiro are weaker).
    int shift = 64;
    for (std::uint64_t b = bound; b > 1; b >>= 1) --shift;
    return shift == 64 ? 0 : next() >> shift;
  }
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  for (;;) {
    const std::uint64_t v = next();
    if (v < limit) return v % bound;
  }
}

} // namespace rcqkd
