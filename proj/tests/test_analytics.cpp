#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>

#include "rcqkd/analytics.hpp"
#include "rcqkd/channel.hpp"
#include "rcqkd/math_util.hpp"

using namespace rcqkd;

TEST_CASE("accept/error probabilities against 40-digit references") {
  ErrorProbs a = error_probs(1024, -0.28389, -0.51480);
  CHECK(a.p_true_accept == doctest::Approx(0.661133628179).epsilon(1e-10));
  CHECK(a.p_false_accept == doctest::Approx(0.015065806214).epsilon(1e-10));
  CHECK(a.p_acc == doctest::Approx(0.676199434393).epsilon(1e-10));
  CHECK(a.ser == doctest::Approx(0.0222801224723).epsilon(1e-10));

  ErrorProbs b = error_probs(32, -0.45, -0.78);
  CHECK(b.p_acc == doctest::Approx(0.73450507038).epsilon(1e-10));
  CHECK(b.ser == doctest::Approx(0.0236707300333).epsilon(1e-10));

  ErrorProbs c = error_probs(32768, -0.21126, -0.38288);
  CHECK(c.p_acc == doctest::Approx(0.639215559701).epsilon(1e-10));
  CHECK(c.ser == doctest::Approx(0.0175506917677).epsilon(1e-10));
}

TEST_CASE("probability identities hold by construction") {
  const std::tuple<std::uint64_t, double, double> cases[] = {
      {64, -0.3, -0.6}, {4096, -0.2, -0.4}, {2, 0.1, 0.5}};
  for (auto [q, g, d] : cases) {
    ErrorProbs p = error_probs(q, g, d);
    CHECK(p.p_acc == doctest::Approx(p.p_true_accept + p.p_false_accept)
                         .epsilon(1e-14));
    CHECK(p.ser == doctest::Approx(p.p_false_accept / p.p_acc).epsilon(1e-14));
    CHECK(p.ber == doctest::Approx(ber_from_ser(p.ser, q)).epsilon(1e-14));
    CHECK(p.p_acc <= 1.0);
    CHECK(p.p_acc >= 0.0);
  }
}

TEST_CASE("ser to ber conversion") {
  CHECK(ber_from_ser(0.1, 2) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(ber_from_ser(0.3, 4) == doctest::Approx(0.3 / 2 * 4.0 / 3.0).epsilon(1e-15));
  CHECK(ber_from_ser(0.0, 1024) == 0.0);
  CHECK_THROWS_AS((void)ber_from_ser(0.1, 3), std::invalid_argument);
}

TEST_CASE("mutual information") {
  // eps = 3 exactly: half a log2(4) is one bit
  ChannelParams ch = derive_channel(1.0, 0.0, 1.5);
  CHECK(ch.eps == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mutual_info_xy(ch) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eavesdropper bound against an independent symplectic computation") {
  CHECK(leakage_ey(derive_channel(1e-6, 1e-5, 5.0)) ==
        doctest::Approx(6.57601871566e-6).epsilon(1e-8));
  CHECK(leakage_ey(derive_channel(1e-2, 1e-5, 0.095)) ==
        doctest::Approx(3.17065001702e-4).epsilon(1e-8));

  ChannelParams mid = derive_channel(1e-6, 1e-5, 9.37);
  CHECK(leakage_ey(mid) / mutual_info_xy(mid) ==
        doctest::Approx(0.9501687155).epsilon(1e-6));

  LeakageParts parts = leakage_parts(derive_channel(1e-6, 1e-5, 5.0));
  CHECK(parts.V == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(parts.nu1 == doctest::Approx(10.99999).epsilon(1e-5));
  CHECK(parts.nu2 == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(parts.nu3 == doctest::Approx(10.99994).epsilon(1e-5));
  CHECK(parts.nu1 >= 1.0 - 1e-12);
  CHECK(parts.nu2 >= 1.0 - 1e-12);
  CHECK(parts.nu3 >= 1.0 - 1e-12);
}

TEST_CASE("closed-form leakage approximation tracks the exact bound") {
  // tight where the expansion is valid, a documented ~1.7e-2 at the low edge
  for (double s = 0.05; s <= 100.0; s *= 2.3) {
    ChannelParams ch = derive_channel(1e-6, 1e-5, s);
    double rel = std::fabs(leakage_ey_approx(ch) - leakage_ey(ch)) / leakage_ey(ch);
    CHECK(rel < 2e-2);
    if (s >= 0.3) CHECK(rel < 1e-3);
  }
}

TEST_CASE("repeater-free envelope") {
  CHECK(devetak_winter_bound(1e-6) ==
        doctest::Approx(7.213475204444817e-7).epsilon(1e-14));
  CHECK_THROWS_AS((void)devetak_winter_bound(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)devetak_winter_bound(1.5), std::invalid_argument);
}

TEST_CASE("key rate assembles its own pieces") {
  ChannelParams ch = derive_channel(1e-6, 1e-5, 0.095);
  OperatingPoint op = derive_operating_point(ch, 32, -0.45, -0.78);
  ErrorProbs probs = error_probs(32, -0.45, -0.78);
  RateReport r = skr_infinity(ch, op, probs);

  const double log2q = 5.0;
  double bracket = (1.0 + op.gamma) * r.i_xy *
                   (1.0 - binary_entropy(probs.ber) -
                    binary_entropy(probs.p_acc) / (probs.p_acc * log2q));
  CHECK(r.skr == doctest::Approx(probs.p_acc * (bracket - r.i_ey)).epsilon(1e-14));
  CHECK(r.delta_i == doctest::Approx(r.i_xy - r.i_ey).epsilon(1e-14));
  CHECK(r.skr_over_dw == doctest::Approx(r.skr / r.dw).epsilon(1e-14));
  CHECK(r.finite_correction == 0.0);

  RateReport rf = skr_infinity(ch, op, probs, 10000);
  CHECK(rf.finite_correction ==
        doctest::Approx(std::log2(20000.0) / (10000.0 * double(op.n))).epsilon(1e-14));
  CHECK(rf.skr == doctest::Approx(r.skr).epsilon(1e-15)); // reported separately

  // rate honors the block-length identity log2(q)/n ~= (1+gamma) i_xy
  CHECK(log2q / double(op.n) ==
        doctest::Approx((1.0 + op.gamma) * r.i_xy).epsilon(1e-3));
}

TEST_CASE("threshold-free variant, quadrature vs 40-digit references") {
  ChannelParams ch = derive_channel(1e-6, 1e-5, 0.095);
  NoThresholdReport a = no_threshold_variant(ch, 32, -0.45);
  CHECK(a.omega == doctest::Approx(0.0909949510047).epsilon(1e-6));
  NoThresholdReport b = no_threshold_variant(ch, 1024, -0.28);
  CHECK(b.omega == doctest::Approx(0.140944464456).epsilon(1e-6));
  NoThresholdReport c = no_threshold_variant(ch, 32768, -0.21);
  CHECK(c.omega == doctest::Approx(0.168808506281).epsilon(1e-6));
  CHECK(a.quadrature_nodes >= 128);

  double skr_by_hand = (1.0 - 0.45) * mutual_info_xy(ch) *
                           (1.0 - binary_entropy(ber_from_ser(a.omega, 32))) -
                       leakage_ey(ch);
  CHECK(a.skr == doctest::Approx(skr_by_hand).epsilon(1e-13));
}
