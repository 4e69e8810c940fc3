#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "rcqkd/codebook.hpp"
#include "rcqkd/scoring.hpp"

namespace rcqkd {

// Accept rule: emit a symbol iff exactly one row scores above theta; that
// row is the winner. Everything else is telemetry.
struct DecodeOutcome {
  static constexpr std::size_t kNoWinner = ~std::size_t{0};

  enum class Reason { unique_above, none_above, multiple_above };

  bool accepted = false;
  std::size_t winner = kNoWinner;
  Reason reason = Reason::none_above;
  std::size_t above_count = 0;
  double max_score = -std::numeric_limits<double>::infinity();
  double runner_up = -std::numeric_limits<double>::infinity();
  std::size_t rows_scored_full = 0;
  std::size_t rows_pruned = 0;            // dropped at a partial-score checkpoint
  std::size_t rows_resolved_deferred = 0; // rejected via deferred enclosure
  std::uint64_t mul_acc_count = 0;        // multiply/lookup-accumulate ops
  // True when every row got an exact score (so max/runner_up are exact).
  // Pruning, deferred rejection, and early abort all clear it; the
  // accept/winner fields remain trustworthy in all cases except pruning,
  // which trades a bounded misprune probability for speed.
  bool diagnostics_complete = true;
};

// Partial-score culling checkpoints. `fraction` is the block prefix at which
// to test; a row is dropped when its partial score sits more than k_sigma
// bridge standard deviations below the line v * theta (v = variance fraction
// accumulated so far), i.e. it would need a > k_sigma upswing to finish at
// theta. Each checkpoint wrongly drops an eventual theta-crosser with
// probability at most Phi(-k_sigma).
struct PruneSchedule {
  struct Checkpoint {
    double fraction = 0.0;
    double k_sigma = 3.0;
  };
  std::vector<Checkpoint> checkpoints;

  static PruneSchedule none() { return {}; }
  static PruneSchedule defaults() {
    return {{{0.25, 3.0}, {0.5, 3.0}}};
  }
};

// Row access for the real-valued decoder; `get` may return a pointer into
// owned storage or fill `scratch` and return scratch.data().
struct RowProvider {
  std::size_t q = 0;
  std::size_t n = 0;
  std::function<const double*(std::size_t l, std::vector<double>& scratch)> get;
};

RowProvider table_provider(const CodebookTable& table);

// Symbol-row access for the quantized decoder.
struct QuantizedRowProvider {
  std::size_t q = 0;
  std::size_t n = 0;
  unsigned b = 0;
  std::function<const QuantizedVector&(std::size_t l, QuantizedVector& scratch)>
      get;
};

QuantizedRowProvider pr_provider(const PseudorandomCodebook& cb,
                                 const PsiChunkFn& custom = nullptr);

// Hard enclosure of a row's final score when the inner term is complete but
// |m|^2 has only been accumulated over the first round(stage * n) elements.
// Uses ctx.amp_bound for the unseen elements; exact (lo == hi) at stage 1.
// Quantized contexts carry a finite amp_bound, so there the enclosure is a
// guarantee, not a heuristic.
struct ScoreInterval {
  double lo = 0.0;
  double hi = 0.0;
};
ScoreInterval deferred_correction(const ScoreContext& ctx, double partial_inner,
                                  double m_norm2_partial, double stage);

// Streaming decoder over real-valued rows with optional checkpoint culling
// and optional early abort once two rows exceed theta.
DecodeOutcome decode_block(const ScoreContext& ctx, const RowProvider& rows,
                           double theta,
                           const PruneSchedule& schedule = PruneSchedule::defaults(),
                           bool early_abort = true);

// Exhaustive baseline: every row scored exactly, no shortcuts, complete
// diagnostics. The correctness anchor for everything above.
DecodeOutcome decode_block_reference(const ScoreContext& ctx,
                                     const CodebookTable& table, double theta);

// Quantized decoder: LUT inner term over the whole row, |m|^2 deferred to
// `defer_stage`; rows whose enclosure tops out at or below theta are
// rejected without completion. Accept/winner agree exactly with full
// scoring by construction. qx must be the block the context was built from.
DecodeOutcome decode_block_quantized(const ScoreContext& qctx,
                                     const QuantizedVector& qx,
                                     const QuantizedRowProvider& rows,
                                     double theta,
                                     const std::vector<double>& lut,
                                     double defer_stage = 0.5,
                                     bool early_abort = true);

} // namespace rcqkd
