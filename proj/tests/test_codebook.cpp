#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rcqkd/codebook.hpp"
#include "rcqkd/math_util.hpp"
#include "rcqkd/rng.hpp"

using namespace rcqkd;

TEST_CASE("explicit table plants y at a hidden row") {
  std::vector<double> y(500);
  Xoshiro256 g(0xA11CE);
  for (auto& v : y) v = g.normal(0.0, 1.2);

  CodebookTable t = build_random_table(y, 64, 1.44, 0xB0B);
  REQUIRE(t.q == 64);
  REQUIRE(t.n == 500);
  REQUIRE(t.u < 64);
  CHECK(std::memcmp(t.row(t.u), y.data(), 500 * sizeof(double)) == 0);

  // decoys carry the advertised variance
  double s2 = 0;
  std::size_t cnt = 0;
  for (std::size_t l = 0; l < t.q; ++l) {
    if (l == t.u) continue;
    for (std::size_t i = 0; i < t.n; ++i) s2 += t.row(l)[i] * t.row(l)[i];
    cnt += t.n;
  }
  CHECK(s2 / double(cnt) == doctest::Approx(1.44).epsilon(0.03));

  CodebookTable t2 = build_random_table(y, 64, 1.44, 0xB0B);
  CHECK(t2.u == t.u);
  CHECK(t2.rows == t.rows);
  CodebookTable t3 = build_random_table(y, 64, 1.44, 0xB0C);
  CHECK(t3.rows != t.rows);

  CHECK_THROWS_AS((void)build_random_table(y, 1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("quantizer bins and representatives") {
  SUBCASE("one bit splits at zero") {
    std::vector<double> v{-2.0, -1e-12, 0.0, 1e-12, 3.0};
    QuantizedVector qv = quantize(v, 1.0, 1);
    CHECK(qv.symbols[0] == 0);
    CHECK(qv.symbols[1] == 0);
    CHECK(qv.symbols[2] == 1);
    CHECK(qv.symbols[3] == 1);
    CHECK(qv.symbols[4] == 1);
  }

  SUBCASE("midpoint representative maps back to its own bin") {
    for (unsigned b : {2u, 4u, 8u, 12u}) {
      const unsigned levels = 1u << b;
      for (unsigned s = 0; s < levels; s += (levels > 64 ? 7 : 1)) {
        double rep = quantile_midpoint(s, b);
        QuantizedVector qv = quantize(&rep, 1, 1.0, b);
        CHECK(qv.symbols[0] == s);
        // scale equivariance: representative in units of sigma
        double scaled = rep * 3.7;
        QuantizedVector qs = quantize(&scaled, 1, 3.7, b);
        CHECK(qs.symbols[0] == s);
      }
    }
  }

  SUBCASE("extremes clamp instead of overflowing") {
    double lo = -50.0, hi = 50.0;
    CHECK(quantize(&lo, 1, 1.0, 8).symbols[0] == 0);
    CHECK(quantize(&hi, 1, 1.0, 8).symbols[0] == 255);
  }

  SUBCASE("largest representative magnitude") {
    CHECK(quantile_midpoint_max(8) ==
          doctest::Approx(-quantile_midpoint(0, 8)).epsilon(1e-15));
    CHECK(quantile_midpoint_max(8) ==
          doctest::Approx(quantile_midpoint(255, 8)).epsilon(1e-12));
    CHECK(quantile_midpoint_max(8) ==
          doctest::Approx(-inv_norm_cdf(0.5 / 256.0)).epsilon(1e-12));
    double z = 0.0;
    CHECK_THROWS_AS((void)quantize(&z, 1, 1.0, 17), std::invalid_argument);
    CHECK_THROWS_AS((void)quantize(&z, 1, 1.0, 0), std::invalid_argument);
  }
}

TEST_CASE("symbol packing round-trips at odd widths") {
  Xoshiro256 g(0x5EED);
  for (unsigned b : {1u, 3u, 4u, 8u, 11u, 16u}) {
    for (std::size_t n : {1, 7, 64, 129}) {
      QuantizedVector v;
      v.b = b;
      v.symbols.resize(n);
      for (auto& s : v.symbols)
        s = static_cast<std::uint16_t>(g.below(std::uint64_t{1} << b));
      auto bytes = pack_symbols(v);
      CHECK(bytes.size() == (n * b + 7) / 8);
      QuantizedVector back = unpack_symbols(bytes, n, b);
      CHECK(back.symbols == v.symbols);
    }
  }
  CHECK_THROWS_AS((void)unpack_symbols({0x01}, 9, 8), std::invalid_argument);
}

TEST_CASE("row expanders are deterministic and well mixed") {
  const std::uint64_t tau = 0x7A5;
  for (PsiKind kind : {PsiKind::fast, PsiKind::chacha20}) {
    std::uint8_t a[64], b[64], c[64], d[64];
    psi_chunk(kind, tau, 5, 0, a);
    psi_chunk(kind, tau, 5, 0, b);
    CHECK(std::memcmp(a, b, 64) == 0);
    psi_chunk(kind, tau, 6, 0, c); // next row
    psi_chunk(kind, tau, 5, 1, d); // next chunk
    int diff_row = 0, diff_chunk = 0;
    for (int i = 0; i < 64; ++i) {
      diff_row += a[i] != c[i];
      diff_chunk += a[i] != d[i];
    }
    CHECK(diff_row > 40);
    CHECK(diff_chunk > 40);
  }
  // the two families disagree with each other
  std::uint8_t f[64], h[64];
  psi_chunk(PsiKind::fast, 1, 2, 3, f);
  psi_chunk(PsiKind::chacha20, 1, 2, 3, h);
  CHECK(std::memcmp(f, h, 64) != 0);
}

TEST_CASE("compressed codebook recovers the hidden row bit for bit") {
  Xoshiro256 g(0xC0DE);
  for (auto [q, n, b] : {std::tuple<std::size_t, std::size_t, unsigned>{32, 100, 8},
                         {64, 333, 5},
                         {16, 40, 11}}) {
    QuantizedVector yq;
    yq.b = b;
    yq.symbols.resize(n);
    for (auto& s : yq.symbols)
      s = static_cast<std::uint16_t>(g.below(std::uint64_t{1} << b));
    std::size_t u = g.below(q);

    for (PsiKind kind : {PsiKind::fast, PsiKind::chacha20}) {
      PseudorandomCodebook cb = pr_encode(yq, u, q, 0x7777, kind);
      QuantizedVector rec = pr_reconstruct_row(cb, u);
      CHECK(rec.symbols == yq.symbols);
      // some other row is (overwhelmingly) different
      QuantizedVector other = pr_reconstruct_row(cb, (u + 1) % q);
      CHECK(other.symbols != yq.symbols);
    }
  }

  SUBCASE("a null expander exposes the construction") {
    PsiChunkFn zero = [](std::uint64_t, std::uint64_t, std::uint32_t,
                         std::uint8_t out[64]) { std::memset(out, 0, 64); };
    QuantizedVector yq;
    yq.b = 4;
    yq.symbols = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    PseudorandomCodebook cb = pr_encode(yq, 3, 8, 99, PsiKind::fast, zero);
    CHECK(cb.mu == pack_symbols(yq)); // stream is zero: mu is the plain packing
    for (std::size_t l = 0; l < 8; ++l) {
      CHECK(pr_reconstruct_row(cb, l, zero).symbols == yq.symbols);
    }
  }

  CHECK_THROWS_AS((void)pr_encode(QuantizedVector{{1, 2}, 4}, 9, 8, 0),
                  std::invalid_argument);
}

TEST_CASE("decoy symbol marginals from the expander look uniform") {
  QuantizedVector yq;
  yq.b = 8;
  yq.symbols.assign(2000, 0); // adversarially constant input
  PseudorandomCodebook cb = pr_encode(yq, 0, 64, 0xFACE);
  double sum = 0;
  std::size_t cnt = 0;
  for (std::size_t l = 1; l < 64; ++l) {
    QuantizedVector row = pr_reconstruct_row(cb, l);
    for (auto s : row.symbols) sum += s;
    cnt += row.symbols.size();
  }
  // uniform on [0,255]: mean 127.5, sd 73.9; 126k samples
  CHECK(sum / double(cnt) == doctest::Approx(127.5).epsilon(0.01));
}

TEST_CASE("binary round trips") {
  SUBCASE("explicit table") {
    std::vector<double> y(37);
    Xoshiro256 g(0xD00D);
    for (auto& v : y) v = g.normal();
    CodebookTable t = build_random_table(y, 8, 1.0, 0xE77E);

    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    save_table(ss, t);
    CodebookTable back = load_table(ss);
    CHECK(back.q == t.q);
    CHECK(back.n == t.n);
    CHECK(back.rows == t.rows);
    CHECK(back.u == CodebookTable::kNoSecret); // secrecy survives the wire
  }

  SUBCASE("compressed book") {
    QuantizedVector yq;
    yq.b = 6;
    yq.symbols = {10, 20, 30, 40, 50, 60, 61, 62, 63, 0, 1};
    PseudorandomCodebook cb = pr_encode(yq, 2, 16, 0xABCD, PsiKind::chacha20);

    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    save_pr(ss, cb);
    PseudorandomCodebook back = load_pr(ss);
    CHECK(back.q == cb.q);
    CHECK(back.n == cb.n);
    CHECK(back.b == cb.b);
    CHECK(back.kind == cb.kind);
    CHECK(back.tau == cb.tau);
    CHECK(back.mu == cb.mu);
    CHECK(pr_reconstruct_row(back, 2).symbols == yq.symbols);
  }

  SUBCASE("garbage is rejected") {
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    ss.write("NOPE----------------", 20);
    CHECK_THROWS_AS((void)load_table(ss), std::runtime_error);
  }
}
