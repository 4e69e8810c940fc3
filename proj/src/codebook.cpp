#include "rcqkd/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "rcqkd/math_util.hpp"
#include "rcqkd/rng.hpp"

namespace rcqkd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void check_bits(unsigned b) {
  if (b < 1 || b > 16)
    throw std::invalid_argument("quantizer: b must be in [1, 16]");
}

} // namespace

CodebookTable build_random_table(const std::vector<double>& y, std::size_t q,
                                 double sigma_y2, std::uint64_t rng_seed) {
  if (q < 2) throw std::invalid_argument("build_random_table: q must be >= 2");
  if (y.empty()) throw std::invalid_argument("build_random_table: empty y");
  if (!(sigma_y2 > 0.0))
    throw std::invalid_argument("build_random_table: sigma_y2 must be > 0");
  CodebookTable t;
  t.q = q;
  t.n = y.size();
  t.rows.resize(q * t.n);
  Xoshiro256 rng(rng_seed);
  t.u = rng.below(q);
  const double sy = std::sqrt(sigma_y2);
  for (std::size_t l = 0; l < q; ++l) {
    double* r = t.row(l);
    if (l == t.u) {
      std::memcpy(r, y.data(), t.n * sizeof(double));
    } else {
      for (std::size_t i = 0; i < t.n; ++i) r[i] = sy * rng.normal();
    }
  }
  return t;
}

QuantizedVector quantize(const double* v, std::size_t n, double sigma,
                         unsigned b) {
  check_bits(b);
  if (!(sigma > 0.0)) throw std::invalid_argument("quantize: sigma must be > 0");
  QuantizedVector out;
  out.b = b;
  out.symbols.resize(n);
  const double levels = static_cast<double>(1u << b);
  const std::uint16_t top = static_cast<std::uint16_t>((1u << b) - 1);
  const double inv_sigma = 1.0 / sigma;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = norm_cdf_approx(v[i] * inv_sigma);
    double s = std::floor(levels * p);
    if (s < 0.0) s = 0.0;
    std::uint16_t sym = static_cast<std::uint16_t>(s);
    if (sym > top) sym = top; // p == 1.0 exactly
    out.symbols[i] = sym;
  }
  return out;
}

QuantizedVector quantize(const std::vector<double>& v, double sigma,
                         unsigned b) {
  return quantize(v.data(), v.size(), sigma, b);
}

double quantile_midpoint(unsigned symbol, unsigned b) {
  check_bits(b);
  if (symbol >= (1u << b))
    throw std::invalid_argument("quantile_midpoint: symbol out of range");
  return inv_norm_cdf((symbol + 0.5) / static_cast<double>(1u << b));
}

double quantile_midpoint_max(unsigned b) { return -quantile_midpoint(0, b); }

namespace {

void psi_chunk_fast(std::uint64_t tau, std::uint64_t l, std::uint32_t j,
                    std::uint8_t out[64]) {
  std::uint64_t s = mix64(tau + kGolden);
  s = mix64(s ^ ((l + 1) * 0xD1B54A32D192ED03ULL));
  s = mix64(s ^ ((static_cast<std::uint64_t>(j) + 1) * 0x8CB92BA72F3D8DD7ULL));
  for (int w = 0; w < 8; ++w) {
    std::uint64_t word = mix64(s + (static_cast<std::uint64_t>(w) + 1) * kGolden);
    for (int k = 0; k < 8; ++k) {
      out[w * 8 + k] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
}

inline std::uint32_t rotl32(std::uint32_t x, int k) {
  return (x << k) | (x >> (32 - k));
}

inline void quarter(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c,
                    std::uint32_t& d) {
  a += b; d ^= a; d = rotl32(d, 16);
  c += d; b ^= c; b = rotl32(b, 12);
  a += b; d ^= a; d = rotl32(d, 8);
  c += d; b ^= c; b = rotl32(b, 7);
}

// RFC 8439 block function. Key schedule: tau expanded through four mix64
// calls; block counter = chunk index, nonce = row index.
void psi_chunk_chacha20(std::uint64_t tau, std::uint64_t l, std::uint32_t j,
                        std::uint8_t out[64]) {
  std::uint32_t st[16];
  st[0] = 0x61707865u;
  st[1] = 0x3320646Eu;
  st[2] = 0x79622D32u;
  st[3] = 0x6B206574u;
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t kw = mix64(tau + (static_cast<std::uint64_t>(i) + 1) * kGolden);
    st[4 + 2 * i] = static_cast<std::uint32_t>(kw & 0xFFFFFFFFu);
    st[5 + 2 * i] = static_cast<std::uint32_t>(kw >> 32);
  }
  st[12] = j;
  st[13] = static_cast<std::uint32_t>(l & 0xFFFFFFFFu);
  st[14] = static_cast<std::uint32_t>(l >> 32);
  st[15] = 0;
  std::uint32_t x[16];
  std::memcpy(x, st, sizeof(st));
  for (int round = 0; round < 10; ++round) {
    quarter(x[0], x[4], x[8], x[12]);
    quarter(x[1], x[5], x[9], x[13]);
    quarter(x[2], x[6], x[10], x[14]);
    quarter(x[3], x[7], x[11], x[15]);
    quarter(x[0], x[5], x[10], x[15]);
    quarter(x[1], x[6], x[11], x[12]);
    quarter(x[2], x[7], x[8], x[13]);
    quarter(x[3], x[4], x[9], x[14]);
  }
  for (int i = 0; i < 16; ++i) {
    const std::uint32_t word = x[i] + st[i];
    out[4 * i + 0] = static_cast<std::uint8_t>(word & 0xFF);
    out[4 * i + 1] = static_cast<std::uint8_t>((word >> 8) & 0xFF);
    out[4 * i + 2] = static_cast<std::uint8_t>((word >> 16) & 0xFF);
    out[4 * i + 3] = static_cast<std::uint8_t>((word >> 24) & 0xFF);
  }
}

void xor_stream(std::vector<std::uint8_t>& buf, PsiKind kind, std::uint64_t tau,
                std::uint64_t l, const PsiChunkFn& custom) {
  std::uint8_t chunk[64];
  const std::size_t nbytes = buf.size();
  for (std::uint32_t j = 0; j * 64ull < nbytes; ++j) {
    if (custom)
      custom(tau, l, j, chunk);
    else
      psi_chunk(kind, tau, l, j, chunk);
    const std::size_t base = static_cast<std::size_t>(j) * 64;
    const std::size_t len = std::min<std::size_t>(64, nbytes - base);
    for (std::size_t k = 0; k < len; ++k) buf[base + k] ^= chunk[k];
  }
}

} // namespace

void psi_chunk(PsiKind kind, std::uint64_t tau, std::uint64_t l,
               std::uint32_t j, std::uint8_t out[64]) {
  switch (kind) {
    case PsiKind::fast: psi_chunk_fast(tau, l, j, out); return;
    case PsiKind::chacha20: psi_chunk_chacha20(tau, l, j, out); return;
  }
  throw std::invalid_argument("psi_chunk: unknown kind");
}

std::vector<std::uint8_t> pack_symbols(const QuantizedVector& v) {
  check_bits(v.b);
  std::vector<std::uint8_t> out;
  out.reserve((v.symbols.size() * v.b + 7) / 8);
  std::uint32_t acc = 0;
  unsigned nbits = 0;
  for (std::uint16_t sym : v.symbols) {
    acc |= static_cast<std::uint32_t>(sym) << nbits;
    nbits += v.b;
    while (nbits >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
      acc >>= 8;
      nbits -= 8;
    }
  }
  if (nbits > 0) out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
  return out;
}

QuantizedVector unpack_symbols(const std::vector<std::uint8_t>& bytes,
                               std::size_t n, unsigned b) {
  check_bits(b);
  if (bytes.size() < (n * b + 7) / 8)
    throw std::invalid_argument("unpack_symbols: byte buffer too short");
  QuantizedVector out;
  out.b = b;
  out.symbols.resize(n);
  const std::uint32_t mask = (1u << b) - 1;
  std::uint32_t acc = 0;
  unsigned nbits = 0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (nbits < b) {
      acc |= static_cast<std::uint32_t>(bytes[pos++]) << nbits;
      nbits += 8;
    }
    out.symbols[i] = static_cast<std::uint16_t>(acc & mask);
    acc >>= b;
    nbits -= b;
  }
  return out;
}

PseudorandomCodebook pr_encode(const QuantizedVector& y_quantized,
                               std::size_t u, std::size_t q, std::uint64_t tau,
                               PsiKind kind, const PsiChunkFn& custom) {
  if (q < 2) throw std::invalid_argument("pr_encode: q must be >= 2");
  if (u >= q) throw std::invalid_argument("pr_encode: u out of range");
  PseudorandomCodebook cb;
  cb.q = q;
  cb.n = y_quantized.symbols.size();
  cb.b = y_quantized.b;
  cb.kind = kind;
  cb.tau = tau;
  cb.mu = pack_symbols(y_quantized);
  xor_stream(cb.mu, kind, tau, u, custom);
  return cb;
}

QuantizedVector pr_reconstruct_row(const PseudorandomCodebook& cb,
                                   std::size_t l, const PsiChunkFn& custom) {
  if (l >= cb.q) throw std::invalid_argument("pr_reconstruct_row: l out of range");
  std::vector<std::uint8_t> buf = cb.mu;
  xor_stream(buf, cb.kind, cb.tau, l, custom);
  return unpack_symbols(buf, cb.n, cb.b);
}

namespace {

constexpr std::uint32_t kMagic = 0x4B514352u; // "RCQK" little-endian
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  std::uint8_t buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint8_t buf[4];
  if (!is.read(reinterpret_cast<char*>(buf), 4))
    throw std::runtime_error("codebook stream: truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  std::uint8_t buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8))
    throw std::runtime_error("codebook stream: truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

void read_header(std::istream& is, std::uint32_t expect_kind_min,
                 std::uint32_t expect_kind_max, std::uint32_t& kind) {
  if (get_u32(is) != kMagic) throw std::runtime_error("codebook stream: bad magic");
  if (get_u32(is) != kVersion)
    throw std::runtime_error("codebook stream: unsupported version");
  kind = get_u32(is);
  if (kind < expect_kind_min || kind > expect_kind_max)
    throw std::runtime_error("codebook stream: wrong payload kind");
}

} // namespace

void save_table(std::ostream& os, const CodebookTable& table) {
  put_u32(os, kMagic);
  put_u32(os, kVersion);
  put_u32(os, 0); // kind 0 = explicit rows
  put_u64(os, table.q);
  put_u64(os, table.n);
  for (double v : table.rows) put_u64(os, std::bit_cast<std::uint64_t>(v));
}

CodebookTable load_table(std::istream& is) {
  std::uint32_t kind = 0;
  read_header(is, 0, 0, kind);
  CodebookTable t;
  t.q = get_u64(is);
  t.n = get_u64(is);
  if (t.q < 2 || t.n == 0) throw std::runtime_error("codebook stream: bad shape");
  t.rows.resize(t.q * t.n);
  for (double& v : t.rows) v = std::bit_cast<double>(get_u64(is));
  return t; // t.u stays kNoSecret: the secret index is not part of the format
}

void save_pr(std::ostream& os, const PseudorandomCodebook& cb) {
  put_u32(os, kMagic);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(cb.kind));
  put_u64(os, cb.q);
  put_u64(os, cb.n);
  put_u32(os, cb.b);
  put_u64(os, cb.tau);
  put_u64(os, cb.mu.size());
  os.write(reinterpret_cast<const char*>(cb.mu.data()),
           static_cast<std::streamsize>(cb.mu.size()));
}

PseudorandomCodebook load_pr(std::istream& is) {
  std::uint32_t kind = 0;
  read_header(is, 1, 2, kind);
  PseudorandomCodebook cb;
  cb.kind = static_cast<PsiKind>(kind);
  cb.q = get_u64(is);
  cb.n = get_u64(is);
  cb.b = get_u32(is);
  cb.tau = get_u64(is);
  const std::uint64_t len = get_u64(is);
  if (cb.q < 2 || cb.n == 0 || cb.b < 1 || cb.b > 16 ||
      len != (cb.n * cb.b + 7) / 8)
    throw std::runtime_error("codebook stream: bad shape");
  cb.mu.resize(len);
  if (!is.read(reinterpret_cast<char*>(cb.mu.data()),
               static_cast<std::streamsize>(len)))
    throw std::runtime_error("codebook stream: truncated");
  return cb;
}

} // namespace rcqkd
