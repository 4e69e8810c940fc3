#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rcqkd/analytics.hpp"
#include "rcqkd/channel.hpp"
#include "rcqkd/codebook.hpp"
#include "rcqkd/decoder.hpp"

namespace rcqkd {

// Codebook realization per block. The Gaussian score model skips vectors
// entirely and draws the q scores from their limiting law: q-1 standard
// normals plus one at mean mu. Model-level only; the vector variants are
// ground truth.
enum class Variant { true_random, pseudorandom, gaussian_model };

struct SessionConfig {
  ChannelParams ch{};
  OperatingPoint op{};
  std::size_t blocks = 0; // N >= 1
  std::uint64_t seed = 1;
  Variant variant = Variant::true_random;
  unsigned b = 8;                 // symbol depth, pseudorandom variant
  PsiKind psi = PsiKind::fast;
  PruneSchedule schedule = PruneSchedule::none();
  double defer_stage = 0.5;       // quantized-path |m|^2 deferral
  bool early_abort = true;
  // Work guard: q*N*n materialized elements for vector variants, q*N score
  // draws for the model. Exceeding it throws BudgetError before any work.
  std::uint64_t element_budget = 4'000'000'000ULL;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pre-shared-key spending and leakage accounting, all in bits. Every block's
// accept decision, the accepted count, the indicator set, the outer-code
// syndrome, and the final verdict ride one-time-pad encrypted classical
// messages; only their lengths matter for the key balance, so lengths are
// what the ledger holds.
struct KeyBudgetLedger {
  double raw_bits = 0.0;       // n_acc * log2 q
  double otp_nacc = 0.0;       // log2 N
  double otp_alpha = 0.0;      // log2 C(N, n_acc), exact
  double otp_syndrome = 0.0;   // h(analytic BER) * n_acc * log2 q
  double otp_final_bit = 0.0;  // 1
  double leakage_budget = 0.0; // n_acc * n * leakage_ey
  double net_key = 0.0;        // raw minus all of the above
  double skr_finite = 0.0;     // net_key / (N * n)
};

struct SessionResult {
  std::size_t blocks = 0;
  std::size_t n_acc = 0;
  std::vector<std::uint8_t> alpha; // accept indicator, one entry per block
  std::size_t symbol_errors = 0;   // accepted blocks whose winner != u
  double p_acc = 0.0;
  double ser = 0.0;
  KeyBudgetLedger ledger{};
  ChannelParams ch{};
  OperatingPoint op{};
  // decode telemetry, summed over blocks
  std::uint64_t mul_acc_count = 0;
  std::size_t rows_pruned = 0;
  std::size_t rows_resolved_deferred = 0;
  std::size_t none_above_blocks = 0;
  std::size_t multi_above_blocks = 0;
};

// Runs N independent blocks: sample channel, build the per-variant codebook,
// decode, compare winner to the hidden index across the Alice/Bob boundary,
// then settle the ledger from exact counts. Fully deterministic in cfg.seed:
// block r uses sub-seeds derived from derive_stream_seed(seed, r), so results
// do not depend on execution order.
SessionResult run_session(const SessionConfig& cfg);

// Exact log2 C(N, k); the ledger's otp_alpha term.
double exact_log_binomial(std::uint64_t N, std::uint64_t k);

} // namespace rcqkd
