#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace rcqkd {

// Explicit random codebook: the reconciled vector y sits at secret row u,
// the other q-1 rows are i.i.d. N(0, sigma_y2) decoys. Decode-side callers
// receive rows only; u stays on the encode side and is never serialized.
struct CodebookTable {
  std::size_t q = 0;
  std::size_t n = 0;
  std::size_t u = kNoSecret; // kNoSecret after deserialization
  std::vector<double> rows;  // q * n, row-major

  static constexpr std::size_t kNoSecret = ~std::size_t{0};
  const double* row(std::size_t l) const { return rows.data() + l * n; }
  double* row(std::size_t l) { return rows.data() + l * n; }
};

// Draws u, then the decoys in index order, from one seeded stream; dropping
// row u therefore recovers the decoy sequence z_1..z_{q-1} unchanged.
CodebookTable build_random_table(const std::vector<double>& y, std::size_t q,
                                 double sigma_y2, std::uint64_t rng_seed);

// b-bit equal-probability-bin quantizer: symbol = floor(2^b Phi(v/sigma)),
// clamped into [0, 2^b - 1]. Uses the pinned rational Phi approximation.
struct QuantizedVector {
  std::vector<std::uint16_t> symbols;
  unsigned b = 0;
};

QuantizedVector quantize(const double* v, std::size_t n, double sigma, unsigned b);
QuantizedVector quantize(const std::vector<double>& v, double sigma, unsigned b);

// Dequantization representative of a symbol: the quantile midpoint
// inv_norm_cdf((s + 1/2) / 2^b), in standardized (sigma = 1) units.
double quantile_midpoint(unsigned symbol, unsigned b);

// Largest representative magnitude for b bits; hard bound on any
// dequantized element, used for exact deferred-score enclosures.
double quantile_midpoint_max(unsigned b);

// Keyed expander family psi: chunk j of row l under key tau, 64 bytes out.
// `fast` is a splitmix-style counter expander; `chacha20` runs the RFC 8439
// block function. Both are pure integer pipelines (identical bytes anywhere).
enum class PsiKind : std::uint32_t { fast = 1, chacha20 = 2 };

using PsiChunkFn =
    std::function<void(std::uint64_t tau, std::uint64_t l, std::uint32_t j,
                       std::uint8_t out[64])>;

void psi_chunk(PsiKind kind, std::uint64_t tau, std::uint64_t l,
               std::uint32_t j, std::uint8_t out[64]);

// Compressed codebook: instead of q explicit rows, publish (tau, mu) where
// mu = pack(y_quantized) XOR psi-stream(tau, row u). Row l reconstructs as
// mu XOR psi-stream(tau, l); row u is y_quantized again bit for bit, every
// other row is a fresh uniform symbol string. A custom chunk function may be
// injected for tests; kind records what goes on the wire.
struct PseudorandomCodebook {
  std::size_t q = 0;
  std::size_t n = 0;
  unsigned b = 0;
  PsiKind kind = PsiKind::fast;
  std::uint64_t tau = 0;
  std::vector<std::uint8_t> mu;
};

PseudorandomCodebook pr_encode(const QuantizedVector& y_quantized,
                               std::size_t u, std::size_t q, std::uint64_t tau,
                               PsiKind kind = PsiKind::fast,
                               const PsiChunkFn& custom = nullptr);

QuantizedVector pr_reconstruct_row(const PseudorandomCodebook& cb,
                                   std::size_t l,
                                   const PsiChunkFn& custom = nullptr);

// Symbol packing used by the pseudorandom construction: b bits per symbol,
// LSB-first within the byte stream.
std::vector<std::uint8_t> pack_symbols(const QuantizedVector& v);
QuantizedVector unpack_symbols(const std::vector<std::uint8_t>& bytes,
                               std::size_t n, unsigned b);

// Binary interchange format (little-endian, "RCQK" magic). Explicit tables
// store raw rows; pseudorandom books store (tau, mu). u is never written.
void save_table(std::ostream& os, const CodebookTable& table);
CodebookTable load_table(std::istream& is);
void save_pr(std::ostream& os, const PseudorandomCodebook& cb);
PseudorandomCodebook load_pr(std::istream& is);

} // namespace rcqkd
