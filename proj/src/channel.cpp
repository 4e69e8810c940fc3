#include "rcqkd/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "rcqkd/rng.hpp"

namespace rcqkd {

ChannelParams derive_channel(double T, double xi, double sigma_x2) {
  if (!(T > 0.0) || T > 1.0)
    throw std::invalid_argument("derive_channel: T must be in (0, 1]");
  if (xi < 0.0) throw std::invalid_argument("derive_channel: xi must be >= 0");
  if (!(sigma_x2 > 0.0))
    throw std::invalid_argument("derive_channel: sigma_x2 must be > 0");
  ChannelParams ch;
  ch.T = T;
  ch.xi = xi;
  ch.sigma_x2 = sigma_x2;
  ch.sigma_ygx2 = 0.5 + 0.5 * T * xi;
  ch.sigma_y2 = T * sigma_x2 + ch.sigma_ygx2;
  ch.eps = T * sigma_x2 / ch.sigma_ygx2;
  return ch;
}

OperatingPoint derive_operating_point(const ChannelParams& ch, std::uint64_t q,
                                      double gamma, double delta) {
  if (q < 2 || (q & (q - 1)) != 0)
    throw std::invalid_argument("derive_operating_point: q must be a power of 2, >= 2");
  if (!(gamma > -1.0))
    throw std::invalid_argument("derive_operating_point: gamma must be > -1");
  OperatingPoint op;
  op.q = q;
  op.gamma = gamma;
  op.delta = delta;
  const double lnq = std::log(static_cast<double>(q));
  op.n_real = 2.0 * lnq / ((1.0 + gamma) * std::log1p(ch.eps));
  const double n_rounded = std::round(op.n_real);
  if (!(n_rounded >= 2.0))
    throw std::invalid_argument("derive_operating_point: block length rounds below 2");
  op.n = static_cast<std::size_t>(n_rounded);
  op.mu = std::sqrt(2.0 * lnq / (1.0 + gamma));
  op.theta = op.mu + delta;
  return op;
}

BlockSample sample_block(const ChannelParams& ch, std::size_t n,
                         std::uint64_t rng_seed) {
  BlockSample blk;
  blk.x.resize(n);
  blk.y.resize(n);
  Xoshiro256 rng(rng_seed);
  const double sx = std::sqrt(ch.sigma_x2);
  const double sn = std::sqrt(ch.sigma_ygx2);
  const double rt = std::sqrt(ch.T);
  for (std::size_t i = 0; i < n; ++i) {
    blk.x[i] = sx * rng.normal();
    blk.y[i] = rt * blk.x[i] + sn * rng.normal();
  }
  return blk;
}

} // namespace rcqkd
