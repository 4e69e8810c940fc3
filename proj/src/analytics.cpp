#include "rcqkd/analytics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcqkd/math_util.hpp"

namespace rcqkd {

ErrorProbs error_probs(std::uint64_t q, double gamma, double delta) {
  if (q < 2) throw std::invalid_argument("error_probs: q must be >= 2");
  if (!(gamma > -1.0)) throw std::invalid_argument("error_probs: gamma must be > -1");
  const double mu = std::sqrt(2.0 * std::log(static_cast<double>(q)) / (1.0 + gamma));
  const double theta = mu + delta;
  // Phi(theta)^(q-1) collapses to 0 in naive arithmetic long before the
  // result does; keep the power in log space via log1p(-Q).
  const double log_phi_theta = std::log1p(-norm_sf(theta));
  const double qm1 = static_cast<double>(q - 1);
  ErrorProbs ep;
  ep.p_true_accept = std::exp(qm1 * log_phi_theta) * norm_sf(delta);
  ep.p_false_accept = qm1 * std::exp((qm1 - 1.0) * log_phi_theta) *
                      norm_sf(theta) * norm_cdf(delta);
  ep.p_acc = ep.p_true_accept + ep.p_false_accept;
  ep.ser = ep.p_acc > 0.0 ? ep.p_false_accept / ep.p_acc : 0.0;
  ep.ber = ber_from_ser(ep.ser, q);
  return ep;
}

double ber_from_ser(double ser, std::uint64_t q) {
  if (q < 2 || (q & (q - 1)) != 0)
    throw std::invalid_argument("ber_from_ser: q must be a power of 2, >= 2");
  // A wrong symbol is uniform over the q-1 others, which flips each of the
  // log2(q) bits with probability (q/2)/(q-1).
  return 0.5 * ser * static_cast<double>(q) / static_cast<double>(q - 1);
}

double mutual_info_xy(const ChannelParams& ch) {
  return 0.5 * std::log1p(ch.eps) / kLn2;
}

LeakageParts leakage_parts(const ChannelParams& ch) {
  LeakageParts lp;
  const double V = 1.0 + 2.0 * ch.sigma_x2;
  const double B = 2.0 * ch.sigma_y2;
  const double C = ch.T * (V * V - 1.0);
  const double delta = V * V + B * B - 2.0 * C;
  const double root_d = V * B - C; // D = root_d^2
  // delta^2 - 4 D factors as below; the factored form survives the severe
  // cancellation at small sigma_x2 where delta^2 and 4D agree to ~10 digits.
  double disc = (V - B) * (V - B) * ((V + B) * (V + B) - 4.0 * C);
  if (disc < 0.0) disc = 0.0;
  const double nu1_sq = 0.5 * (delta + std::sqrt(disc));
  lp.V = V;
  lp.nu1 = std::sqrt(nu1_sq);
  lp.nu2 = std::fabs(root_d) / lp.nu1;
  lp.nu3 = std::sqrt(V * (V - C / B));
  return lp;
}

double leakage_ey(const ChannelParams& ch) {
  const LeakageParts lp = leakage_parts(ch);
  for (double nu : {lp.nu1, lp.nu2, lp.nu3})
    if (nu < 1.0 - 1e-9)
      throw std::domain_error("leakage_ey: unphysical symplectic eigenvalue");
  return thermal_entropy(0.5 * (lp.nu1 - 1.0)) +
         thermal_entropy(0.5 * (lp.nu2 - 1.0)) -
         thermal_entropy(0.5 * (lp.nu3 - 1.0));
}

double leakage_ey_approx(const ChannelParams& ch) {
  const double sx2 = ch.sigma_x2;
  return ch.eps / (2.0 * kLn2) * sx2 * std::log((1.0 + sx2) / sx2);
}

double devetak_winter_bound(double T) {
  if (!(T > 0.0) || T > 1.0)
    throw std::invalid_argument("devetak_winter_bound: T must be in (0, 1]");
  return T / (2.0 * kLn2);
}

RateReport skr_infinity(const ChannelParams& ch, const OperatingPoint& op,
                        const ErrorProbs& probs, std::uint64_t N) {
  RateReport r;
  r.i_xy = mutual_info_xy(ch);
  r.i_ey = leakage_ey(ch);
  r.delta_i = r.i_xy - r.i_ey;
  r.dw = devetak_winter_bound(ch.T);
  const double log2q = std::log2(static_cast<double>(op.q));
  if (probs.p_acc > 0.0) {
    const double bracket =
        (1.0 + op.gamma) * r.i_xy *
        (1.0 - binary_entropy(probs.ber) -
         binary_entropy(probs.p_acc) / (probs.p_acc * log2q));
    r.skr = probs.p_acc * (bracket - r.i_ey);
  }
  if (N > 0) {
    r.finite_correction = std::log2(2.0 * static_cast<double>(N)) /
                          (static_cast<double>(N) * static_cast<double>(op.n));
  }
  r.skr_over_dw = r.skr / r.dw;
  r.skr_over_delta_i = r.delta_i != 0.0 ? r.skr / r.delta_i : 0.0;
  return r;
}

namespace {

// Physicists' Gauss-Hermite nodes/weights, cached per node count.
struct GaussHermite {
  std::vector<double> x, w;
};

// Orthonormal Hermite value p1 at z plus pp = sqrt(2n) H~_{n-1}(z), the
// derivative carrier at a root. Raw values overflow a double near the outer
// roots once n reaches the low thousands; rescaling preserves the Newton
// ratio p1/pp and the sign, and any node far enough out to trip it has a
// true weight below 1e-300, i.e. zero in a double.
struct HermEval {
  double p1 = 0.0, pp = 0.0;
  bool rescaled = false;
};

HermEval herm_eval(int n, double z) {
  const double pim4 = 0.75112554446494248286; // pi^(-1/4)
  HermEval e;
  double p1 = pim4, p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
         std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
    if (std::fabs(p1) > 1e150) {
      p1 *= 1e-150;
      p2 *= 1e-150;
      e.rescaled = true;
    }
  }
  e.p1 = p1;
  e.pp = std::sqrt(2.0 * n) * p2;
  return e;
}

const GaussHermite& gauss_hermite(int n) {
  static std::map<int, GaussHermite> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussHermite gh;
  gh.x.resize(n);
  gh.w.resize(n);
  // Bracket every positive root by scanning down from the top bound at a
  // quarter of the tightest (central) root spacing, then polish each bracket
  // with bisection-safeguarded Newton. The textbook extrapolated starting
  // guesses drift off the true roots past a couple hundred nodes; brackets
  // cannot.
  const int mpos = n / 2;
  const double zmax = std::sqrt(2.0 * n + 1.0); // strict bound on the top root
  const double scan = 3.14159265358979323846 / zmax / 4.0;
  int found = 0;
  double hi_z = zmax;
  double hi_f = herm_eval(n, hi_z).p1;
  while (found < mpos) {
    const double lo_z = hi_z - scan;
    const double lo_f = herm_eval(n, lo_z).p1;
    if ((lo_f > 0.0) != (hi_f > 0.0)) {
      double lo = lo_z, hi = hi_z;
      const bool lo_pos = lo_f > 0.0;
      double z = 0.5 * (lo + hi);
      HermEval e = herm_eval(n, z);
      for (int iter = 0; iter < 100 && e.p1 != 0.0; ++iter) {
        if ((e.p1 > 0.0) == lo_pos)
          lo = z;
        else
          hi = z;
        double znext = z - e.p1 / e.pp;
        if (!(znext > lo && znext < hi)) znext = 0.5 * (lo + hi);
        const bool done = std::fabs(znext - z) <= 3e-14;
        z = znext;
        e = herm_eval(n, z); // final pass lands the weight on the root
        if (done) break;
      }
      gh.x[found] = z;
      gh.x[n - 1 - found] = -z;
      gh.w[found] = e.rescaled ? 0.0 : 2.0 / (e.pp * e.pp);
      gh.w[n - 1 - found] = gh.w[found];
      ++found;
    }
    hi_z = lo_z;
    hi_f = lo_f;
    if (hi_z < -0.5 * scan)
      throw std::runtime_error("gauss_hermite: root scan failed");
  }
  if (n % 2) {
    const HermEval e = herm_eval(n, 0.0);
    gh.x[mpos] = 0.0;
    gh.w[mpos] = 2.0 / (e.pp * e.pp);
  }
  return cache.emplace(n, std::move(gh)).first->second;
}

// P(argmax is the hidden row) = E_lambda[ Phi(mu + lambda)^(q-1) ].
double argmax_win_prob(double mu, std::uint64_t q, int nodes) {
  const GaussHermite& gh = gauss_hermite(nodes);
  const double qm1 = static_cast<double>(q - 1);
  const double inv_sqrt_pi = 0.56418958354775628695;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double lambda = std::sqrt(2.0) * gh.x[i];
    acc += gh.w[i] * std::exp(qm1 * log_norm_cdf(mu + lambda));
  }
  return acc * inv_sqrt_pi;
}

} // namespace

NoThresholdReport no_threshold_variant(const ChannelParams& ch, std::uint64_t q,
                                       double gamma) {
  if (q < 2 || (q & (q - 1)) != 0)
    throw std::invalid_argument("no_threshold_variant: q must be a power of 2, >= 2");
  if (!(gamma > -1.0))
    throw std::invalid_argument("no_threshold_variant: gamma must be > -1");
  const double mu = std::sqrt(2.0 * std::log(static_cast<double>(q)) / (1.0 + gamma));
  NoThresholdReport rep;
  double prev = -1.0;
  for (int nodes : {64, 128, 256, 512, 1024, 2048, 4096}) {
    const double win = argmax_win_prob(mu, q, nodes);
    rep.omega = 1.0 - win;
    rep.quadrature_nodes = nodes;
    if (prev >= 0.0 &&
        std::fabs(rep.omega - prev) <= 1e-7 * std::max(rep.omega, 1e-300))
      break;
    prev = rep.omega;
  }
  const double i_xy = mutual_info_xy(ch);
  rep.skr = (1.0 + gamma) * i_xy *
                (1.0 - binary_entropy(ber_from_ser(rep.omega, q))) -
            leakage_ey(ch);
  return rep;
}

} // namespace rcqkd
