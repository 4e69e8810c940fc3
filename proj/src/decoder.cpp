#include "rcqkd/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcqkd {

RowProvider table_provider(const CodebookTable& table) {
  RowProvider p;
  p.q = table.q;
  p.n = table.n;
  p.get = [&table](std::size_t l, std::vector<double>&) { return table.row(l); };
  return p;
}

QuantizedRowProvider pr_provider(const PseudorandomCodebook& cb,
                                 const PsiChunkFn& custom) {
  QuantizedRowProvider p;
  p.q = cb.q;
  p.n = cb.n;
  p.b = cb.b;
  p.get = [&cb, custom](std::size_t l,
                        QuantizedVector& scratch) -> const QuantizedVector& {
    scratch = pr_reconstruct_row(cb, l, custom);
    return scratch;
  };
  return p;
}

ScoreInterval deferred_correction(const ScoreContext& ctx, double partial_inner,
                                  double m_norm2_partial, double stage) {
  if (!(stage > 0.0) || stage > 1.0)
    throw std::invalid_argument("deferred_correction: stage must be in (0, 1]");
  const double n = static_cast<double>(ctx.n);
  const auto done = static_cast<std::size_t>(std::llround(stage * n));
  const std::size_t remaining = ctx.n - std::min(done, ctx.n);
  ScoreInterval iv;
  iv.hi = (partial_inner * ctx.inv_inner_scale +
           ctx.corr * (1.0 - m_norm2_partial * ctx.inv_n_sy2)) *
          ctx.inv_den;
  // Unseen |m|^2 mass only lowers the score; amp_bound caps how far.
  iv.lo = iv.hi - ctx.corr * static_cast<double>(remaining) * ctx.amp_bound *
                      ctx.amp_bound * ctx.inv_n_sy2 * ctx.inv_den;
  return iv;
}

namespace {

struct Checkpoint {
  std::size_t k = 0;
  double bound = 0.0;
};

// Convert schedule fractions into element counts and partial-score cull
// bounds. The partial score at k elements is a Brownian bridge sample in
// variance time v(k); rows below v*theta - k_sigma * sqrt(v(1-v)) would need
// an upswing beyond k_sigma bridge sigmas to reach theta at the end.
std::vector<Checkpoint> make_checkpoints(const ScoreContext& ctx,
                                         const PruneSchedule& schedule,
                                         double theta) {
  std::vector<Checkpoint> cps;
  if (schedule.checkpoints.empty()) return cps;
  const double n = static_cast<double>(ctx.n);
  const double half_eps_ratio = 0.5 * ctx.ch.eps / (1.0 + ctx.ch.eps);
  std::vector<PruneSchedule::Checkpoint> sorted = schedule.checkpoints;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.fraction < b.fraction; });
  double prefix_x2 = 0.0;
  std::size_t next = 0;
  for (const auto& sc : sorted) {
    if (!(sc.fraction > 0.0) || sc.fraction >= 1.0)
      throw std::invalid_argument("PruneSchedule: fraction must be in (0, 1)");
    auto k = static_cast<std::size_t>(std::llround(sc.fraction * n));
    k = std::clamp<std::size_t>(k, 1, ctx.n - 1);
    while (next < k) {
      prefix_x2 += ctx.x[next] * ctx.x[next];
      ++next;
    }
    const double v = (prefix_x2 / (n * ctx.ch.sigma_x2) +
                      (static_cast<double>(k) / n) * half_eps_ratio) *
                     ctx.inv_den * ctx.inv_den;
    if (!(v > 0.0) || v >= 1.0) continue;
    const double bound = v * theta - sc.k_sigma * std::sqrt(v * (1.0 - v));
    if (!cps.empty() && cps.back().k == k) {
      cps.back().bound = std::max(cps.back().bound, bound);
      continue;
    }
    cps.push_back({k, bound});
  }
  return cps;
}

void record_exact(DecodeOutcome& out, std::size_t l, double s, double theta) {
  ++out.rows_scored_full;
  if (s > out.max_score) {
    out.runner_up = out.max_score;
    out.max_score = s;
  } else if (s > out.runner_up) {
    out.runner_up = s;
  }
  if (s > theta) {
    ++out.above_count;
    if (out.above_count == 1) out.winner = l;
  }
}

void finalize(DecodeOutcome& out) {
  if (out.above_count == 1) {
    out.accepted = true;
    out.reason = DecodeOutcome::Reason::unique_above;
  } else if (out.above_count == 0) {
    out.winner = DecodeOutcome::kNoWinner;
    out.reason = DecodeOutcome::Reason::none_above;
  } else {
    out.winner = DecodeOutcome::kNoWinner;
    out.reason = DecodeOutcome::Reason::multiple_above;
  }
}

} // namespace

DecodeOutcome decode_block(const ScoreContext& ctx, const RowProvider& rows,
                           double theta, const PruneSchedule& schedule,
                           bool early_abort) {
  if (rows.n != ctx.n) throw std::invalid_argument("decode_block: length mismatch");
  const std::vector<Checkpoint> cps = make_checkpoints(ctx, schedule, theta);
  const double n = static_cast<double>(ctx.n);

  // Pre-scale x so the inner term needs one multiply-accumulate per element.
  std::vector<double> xw(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) xw[i] = ctx.x[i] * ctx.inv_inner_scale;

  DecodeOutcome out;
  out.mul_acc_count = ctx.n; // the xw pre-scale
  std::vector<double> scratch;
  for (std::size_t l = 0; l < rows.q; ++l) {
    const double* m = rows.get(l, scratch);
    double inner = 0.0, msq = 0.0;
    std::size_t i = 0;
    bool pruned = false;
    for (const Checkpoint& cp : cps) {
      for (; i < cp.k; ++i) {
        inner += m[i] * xw[i];
        msq += m[i] * m[i];
      }
      const double partial =
          (inner + ctx.corr * (static_cast<double>(i) / n - msq * ctx.inv_n_sy2)) *
          ctx.inv_den;
      if (partial < cp.bound) {
        pruned = true;
        break;
      }
    }
    if (pruned) {
      ++out.rows_pruned;
      out.mul_acc_count += 2 * i;
      out.diagnostics_complete = false;
      continue;
    }
    for (; i < ctx.n; ++i) {
      inner += m[i] * xw[i];
      msq += m[i] * m[i];
    }
    out.mul_acc_count += 2 * ctx.n;
    const double s = (inner + ctx.corr * (1.0 - msq * ctx.inv_n_sy2)) * ctx.inv_den;
    record_exact(out, l, s, theta);
    if (early_abort && out.above_count >= 2) {
      out.diagnostics_complete = false;
      break;
    }
  }
  finalize(out);
  return out;
}

DecodeOutcome decode_block_reference(const ScoreContext& ctx,
                                     const CodebookTable& table, double theta) {
  return decode_block(ctx, table_provider(table), theta, PruneSchedule::none(),
                      /*early_abort=*/false);
}

DecodeOutcome decode_block_quantized(const ScoreContext& qctx,
                                     const QuantizedVector& qx,
                                     const QuantizedRowProvider& rows,
                                     double theta,
                                     const std::vector<double>& lut,
                                     double defer_stage, bool early_abort) {
  if (rows.n != qctx.n || qx.symbols.size() != qctx.n)
    throw std::invalid_argument("decode_block_quantized: length mismatch");
  if (qx.b != rows.b)
    throw std::invalid_argument("decode_block_quantized: mixed bit widths");
  if (!(defer_stage > 0.0) || defer_stage > 1.0)
    throw std::invalid_argument("decode_block_quantized: defer_stage in (0, 1]");
  const std::size_t levels = std::size_t{1} << rows.b;
  if (lut.size() != levels * levels)
    throw std::invalid_argument("decode_block_quantized: lut size mismatch");

  std::vector<std::size_t> xoff(qctx.n);
  for (std::size_t i = 0; i < qctx.n; ++i)
    xoff[i] = static_cast<std::size_t>(qx.symbols[i]) * levels;

  const auto k_done =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(
                                  defer_stage * static_cast<double>(qctx.n))),
                              1, qctx.n);
  const double stage = static_cast<double>(k_done) / static_cast<double>(qctx.n);

  DecodeOutcome out;
  QuantizedVector scratch;
  for (std::size_t l = 0; l < rows.q; ++l) {
    const QuantizedVector& qm = rows.get(l, scratch);
    double inner = 0.0;
    for (std::size_t i = 0; i < qctx.n; ++i) inner += lut[xoff[i] + qm.symbols[i]];
    double msq = 0.0;
    for (std::size_t i = 0; i < k_done; ++i) {
      const std::size_t s = qm.symbols[i];
      msq += lut[s * levels + s];
    }
    out.mul_acc_count += qctx.n + k_done;
    const ScoreInterval iv = deferred_correction(qctx, inner, msq, stage);
    if (iv.hi <= theta) {
      // Enclosure proves this row cannot cross theta; skip the rest of it.
      ++out.rows_resolved_deferred;
      out.diagnostics_complete = false;
      continue;
    }
    for (std::size_t i = k_done; i < qctx.n; ++i) {
      const std::size_t s = qm.symbols[i];
      msq += lut[s * levels + s];
    }
    out.mul_acc_count += qctx.n - k_done;
    const double sc =
        (inner * qctx.inv_inner_scale + qctx.corr * (1.0 - msq * qctx.inv_n_sy2)) *
        qctx.inv_den;
    record_exact(out, l, sc, theta);
    if (early_abort && out.above_count >= 2) {
      out.diagnostics_complete = false;
      break;
    }
  }
  finalize(out);
  return out;
}

} // namespace rcqkd
