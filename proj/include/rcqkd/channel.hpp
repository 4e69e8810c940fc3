#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rcqkd {

// Gaussian channel between Alice's modulated quadrature x ~ N(0, sigma_x2)
// and Bob's heterodyne outcome y = sqrt(T) x + noise, in shot-noise units.
struct ChannelParams {
  double T = 0.0;          // transmittance, (0, 1]
  double xi = 0.0;         // excess noise referred to the input, >= 0
  double sigma_x2 = 0.0;   // modulation variance
  double sigma_ygx2 = 0.0; // Var(y | x) = 1/2 + T xi / 2
  double sigma_y2 = 0.0;   // Var(y) = T sigma_x2 + Var(y|x)
  double eps = 0.0;        // SNR = T sigma_x2 / Var(y|x)
};

ChannelParams derive_channel(double T, double xi, double sigma_x2);

// Code geometry for a target alphabet size q = 2^bits and the two tuning
// offsets: gamma trades rate against reliability, delta shifts the accept
// threshold off the nominal score mean.
struct OperatingPoint {
  std::uint64_t q = 0;
  double gamma = 0.0;
  double delta = 0.0;
  double n_real = 0.0;   // 2 ln q / ((1+gamma) ln(1+eps)) before rounding
  std::size_t n = 0;     // block length actually used
  double theta = 0.0;    // accept threshold sqrt(2 ln q / (1+gamma)) + delta
  double mu = 0.0;       // nominal true-score mean sqrt(2 ln q / (1+gamma))
};

OperatingPoint derive_operating_point(const ChannelParams& ch, std::uint64_t q,
                                      double gamma, double delta);

struct BlockSample {
  std::vector<double> x;
  std::vector<double> y;
};

// One i.i.d. block of channel uses. Draw order is pinned (x_i then the noise
// for y_i, per index), so a seed fully determines the block.
BlockSample sample_block(const ChannelParams& ch, std::size_t n,
                         std::uint64_t rng_seed);

} // namespace rcqkd
