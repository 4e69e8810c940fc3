#include "rcqkd/scoring.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcqkd {

namespace {

ScoreContext finish_context(std::vector<double> x, const ChannelParams& ch) {
  ScoreContext ctx;
  ctx.n = x.size();
  if (ctx.n == 0) throw std::invalid_argument("make_context: empty x");
  ctx.x = std::move(x);
  ctx.ch = ch;
  double x2 = 0.0;
  for (double v : ctx.x) x2 += v * v;
  ctx.x_norm2 = x2;
  const double n = static_cast<double>(ctx.n);
  const double eps = ch.eps;
  const double half_eps_ratio = 0.5 * eps / (1.0 + eps);
  ctx.inv_den = 1.0 / std::sqrt(x2 / (n * ch.sigma_x2) + half_eps_ratio);
  ctx.corr = 0.5 * std::sqrt(n * eps / (1.0 + eps));
  ctx.inv_inner_scale =
      1.0 / (std::sqrt(ch.sigma_y2) * std::sqrt(ch.sigma_x2) * std::sqrt(n));
  ctx.inv_n_sy2 = 1.0 / (n * ch.sigma_y2);
  ctx.amp_bound = std::numeric_limits<double>::infinity();
  return ctx;
}

} // namespace

ScoreContext make_context(std::vector<double> x, const ChannelParams& ch) {
  return finish_context(std::move(x), ch);
}

ScoreContext make_quantized_context(const QuantizedVector& qx,
                                    const ChannelParams& ch) {
  std::vector<double> xr(qx.symbols.size());
  for (std::size_t i = 0; i < xr.size(); ++i)
    xr[i] = quantile_midpoint(qx.symbols[i], qx.b);
  ChannelParams unit = ch;
  unit.sigma_x2 = 1.0;
  unit.sigma_y2 = 1.0;
  ScoreContext ctx = finish_context(std::move(xr), unit);
  ctx.amp_bound = quantile_midpoint_max(qx.b);
  return ctx;
}

double score(const ScoreContext& ctx, const double* m) {
  double inner = 0.0, msq = 0.0;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    inner += m[i] * ctx.x[i];
    msq += m[i] * m[i];
  }
  return (inner * ctx.inv_inner_scale +
          ctx.corr * (1.0 - msq * ctx.inv_n_sy2)) *
         ctx.inv_den;
}

double score(const ScoreContext& ctx, const std::vector<double>& m) {
  if (m.size() != ctx.n) throw std::invalid_argument("score: length mismatch");
  return score(ctx, m.data());
}

ScoreStats analytic_score_stats(const ScoreContext& ctx) {
  const double n = static_cast<double>(ctx.n);
  const double eps = ctx.ch.eps;
  const double r = ctx.x_norm2 / (n * ctx.ch.sigma_x2);
  const double den2 = r + 0.5 * eps / (1.0 + eps);
  ScoreStats st;
  st.mean_true = std::sqrt(n * eps) / std::pow(1.0 + eps, 1.5) *
                 (r * (1.0 + 0.5 * eps) + 0.5 * eps) / std::sqrt(den2);
  st.var_true = (r + 0.5 * eps) / (den2 * (1.0 + eps) * (1.0 + eps) * (1.0 + eps));
  st.mean_fake = 0.0;
  st.var_fake = 1.0;
  return st;
}

int likelihood_ratio_order(const ScoreContext& ctx, const double* m1,
                           const double* m2) {
  const double rt = std::sqrt(ctx.ch.T);
  const double inv2_cond = 0.5 / ctx.ch.sigma_ygx2;
  const double inv2_marg = 0.5 / ctx.ch.sigma_y2;
  const double log_const =
      0.5 * static_cast<double>(ctx.n) * std::log(ctx.ch.sigma_y2 / ctx.ch.sigma_ygx2);
  double l1 = log_const, l2 = log_const;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    const double mu_i = rt * ctx.x[i];
    const double d1 = m1[i] - mu_i;
    const double d2 = m2[i] - mu_i;
    l1 += m1[i] * m1[i] * inv2_marg - d1 * d1 * inv2_cond;
    l2 += m2[i] * m2[i] * inv2_marg - d2 * d2 * inv2_cond;
  }
  const double diff = l1 - l2;
  const double tol =
      1e-12 * std::max(1.0, std::max(std::fabs(l1), std::fabs(l2)));
  if (diff > tol) return 1;
  if (diff < -tol) return -1;
  return 0;
}

std::vector<double> score_lut_build(unsigned b) {
  if (b < 1 || b > 12)
    throw std::invalid_argument("score_lut_build: b must be in [1, 12]");
  const std::size_t levels = std::size_t{1} << b;
  std::vector<double> reps(levels);
  for (std::size_t s = 0; s < levels; ++s)
    reps[s] = quantile_midpoint(static_cast<unsigned>(s), b);
  std::vector<double> lut(levels * levels);
  for (std::size_t j = 0; j < levels; ++j)
    for (std::size_t k = 0; k < levels; ++k) lut[j * levels + k] = reps[j] * reps[k];
  return lut;
}

namespace {

void check_quantized(const ScoreContext& qctx, const QuantizedVector& qx,
                     const QuantizedVector& qm, const std::vector<double>& lut) {
  if (qx.b != qm.b) throw std::invalid_argument("quantized score: mixed bit widths");
  if (qx.symbols.size() != qctx.n || qm.symbols.size() != qctx.n)
    throw std::invalid_argument("quantized score: length mismatch");
  const std::size_t levels = std::size_t{1} << qx.b;
  if (lut.size() != levels * levels)
    throw std::invalid_argument("quantized score: lut size mismatch");
}

} // namespace

double score_quantized(const ScoreContext& qctx, const QuantizedVector& qx,
                       const QuantizedVector& qm, const std::vector<double>& lut) {
  check_quantized(qctx, qx, qm, lut);
  const std::size_t levels = std::size_t{1} << qx.b;
  double inner = 0.0, msq = 0.0;
  for (std::size_t i = 0; i < qctx.n; ++i) {
    inner += lut[qx.symbols[i] * levels + qm.symbols[i]];
    msq += lut[qm.symbols[i] * levels + qm.symbols[i]];
  }
  return (inner * qctx.inv_inner_scale +
          qctx.corr * (1.0 - msq * qctx.inv_n_sy2)) *
         qctx.inv_den;
}

double score_tally(const ScoreContext& qctx, const QuantizedVector& qx,
                   const QuantizedVector& qm, const std::vector<double>& lut) {
  check_quantized(qctx, qx, qm, lut);
  const std::size_t levels = std::size_t{1} << qx.b;
  std::vector<std::uint32_t> pair_tally(levels * levels, 0);
  std::vector<std::uint32_t> m_tally(levels, 0);
  for (std::size_t i = 0; i < qctx.n; ++i) {
    ++pair_tally[qx.symbols[i] * levels + qm.symbols[i]];
    ++m_tally[qm.symbols[i]];
  }
  double inner = 0.0;
  for (std::size_t cell = 0; cell < pair_tally.size(); ++cell)
    if (pair_tally[cell] != 0) inner += pair_tally[cell] * lut[cell];
  double msq = 0.0;
  for (std::size_t k = 0; k < levels; ++k)
    if (m_tally[k] != 0) msq += m_tally[k] * lut[k * levels + k];
  return (inner * qctx.inv_inner_scale +
          qctx.corr * (1.0 - msq * qctx.inv_n_sy2)) *
         qctx.inv_den;
}

} // namespace rcqkd
