#pragma once

#include <cstddef>
#include <vector>

#include "rcqkd/channel.hpp"
#include "rcqkd/codebook.hpp"

namespace rcqkd {

// Precomputed per-block state for scoring candidate rows m against Alice's
// block x. The score is
//
//   J(x, m) = [ <m, x>/(sy sx sqrt(n)) + c (1 - |m|^2/(n sy2)) ] / den(x),
//
// with c = (1/2) sqrt(n eps/(1+eps)) and
// den(x) = sqrt(|x|^2/(n sx2) + eps/(2(1+eps))). Decoy rows score exactly
// N(0,1) under this normalization, whatever x is.
struct ScoreContext {
  std::vector<double> x;
  std::size_t n = 0;
  double x_norm2 = 0.0;
  ChannelParams ch;
  // cached factors
  double inv_den = 0.0;
  double corr = 0.0;
  double inv_inner_scale = 0.0; // 1/(sy sx sqrt(n))
  double inv_n_sy2 = 0.0;
  // Guaranteed bound on |m_i| for rows this context will ever score, in m's
  // own units. Infinite for real-valued rows; finite (the largest
  // representative) for quantized contexts, where it makes deferred-score
  // enclosures exact.
  double amp_bound = 0.0;
};

ScoreContext make_context(std::vector<double> x, const ChannelParams& ch);

// Context over dequantized x-representatives in standardized units
// (sigma_x = sigma_y = 1, channel eps retained). Only for the quantized
// score path; its ch field is a scoring device, not a physical channel.
ScoreContext make_quantized_context(const QuantizedVector& qx,
                                    const ChannelParams& ch);

double score(const ScoreContext& ctx, const double* m);
double score(const ScoreContext& ctx, const std::vector<double>& m);

// Analytic moments of the score for the hidden row (conditioned on x) and
// for decoys (exactly 0/1).
struct ScoreStats {
  double mean_true = 0.0;
  double var_true = 0.0;
  double mean_fake = 0.0;
  double var_fake = 1.0;
};
ScoreStats analytic_score_stats(const ScoreContext& ctx);

// Sign of log LR(m1) - log LR(m2) where LR(m) = f(m | x)/f(m) under the
// Gaussian channel; ties (|difference| below 1e-12 relative) return 0.
int likelihood_ratio_order(const ScoreContext& ctx, const double* m1,
                           const double* m2);

// 2^b x 2^b table of representative products rep_j * rep_k: the per-element
// contribution of the inner term when both sides are b-bit symbols. The
// diagonal doubles as the |m|^2 table. Rejects b > 12 (memory).
std::vector<double> score_lut_build(unsigned b);

// Hot path: sequential per-index lookup accumulation.
double score_quantized(const ScoreContext& qctx, const QuantizedVector& qx,
                       const QuantizedVector& qm, const std::vector<double>& lut);

// Canonical quantized score: tally symbol-pair multiplicities, then reduce
// t_cell * lut_cell over cells in row-major order. Input order cannot affect
// the result (integer tallies commute), so this is the reproducibility
// anchor the sequential path is checked against.
double score_tally(const ScoreContext& qctx, const QuantizedVector& qx,
                   const QuantizedVector& qm, const std::vector<double>& lut);

} // namespace rcqkd
