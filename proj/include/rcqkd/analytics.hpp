#pragma once

#include <cstdint>

#include "rcqkd/channel.hpp"

namespace rcqkd {

// Closed-form accept/error probabilities of the exactly-one-above-threshold
// rule under the Gaussian score model (q-1 scores ~ N(0,1), one ~ N(mu,1)).
struct ErrorProbs {
  double p_true_accept = 0.0; // unique survivor is the hidden row
  double p_false_accept = 0.0; // unique survivor is one of the q-1 decoys
  double p_acc = 0.0;          // either way: block produces a symbol
  double ser = 0.0;            // symbol error rate among accepted blocks
  double ber = 0.0;            // induced bit error rate, random symbol labels
};

ErrorProbs error_probs(std::uint64_t q, double gamma, double delta);

// ser -> bit error rate for uniformly mislabeled symbols over log2(q) bits.
double ber_from_ser(double ser, std::uint64_t q);

double mutual_info_xy(const ChannelParams& ch); // (1/2) log2(1+eps), bits/use

// Eavesdropper Holevo bound chi(E;Y) for the purifying collective attack,
// computed from the three symplectic eigenvalues of the relevant states.
// Throws std::domain_error if numerics push an eigenvalue below 1 - 1e-9.
double leakage_ey(const ChannelParams& ch);

// Low-SNR expansion of the same quantity; error terms O(eps^2) and
// O(T xi log(1/(T xi))), so it degrades for small sigma_x2 at xi > 0.
double leakage_ey_approx(const ChannelParams& ch);

// Intermediate quantities behind leakage_ey, exposed for verification.
struct LeakageParts {
  double V = 0.0;   // EPR state variance 1 + 2 sigma_x2
  double nu1 = 0.0; // joint-state symplectic eigenvalues...
  double nu2 = 0.0;
  double nu3 = 0.0; // ...and the y-conditioned one
};
LeakageParts leakage_parts(const ChannelParams& ch);

// Repeater-free rate ceiling T / (2 ln 2) bits per use.
double devetak_winter_bound(double T);

struct RateReport {
  double i_xy = 0.0;
  double i_ey = 0.0;
  double delta_i = 0.0; // i_xy - i_ey
  double dw = 0.0;
  double skr = 0.0; // asymptotic secret-key rate per channel use, bits
  double skr_over_dw = 0.0;
  double skr_over_delta_i = 0.0;
  double finite_correction = 0.0; // log2(2N)/(N n), only when N supplied
};

// Asymptotic key rate of the scheme: accepted blocks carry log2 q raw bits
// over n uses, minus reconciliation and privacy-amplification costs. The
// O(log(N)/(N n)) session overhead is excluded from skr and reported
// separately when a block count N > 0 is given.
RateReport skr_infinity(const ChannelParams& ch, const OperatingPoint& op,
                        const ErrorProbs& probs, std::uint64_t N = 0);

// Threshold-free decoder variant: always output the argmax row. omega is its
// symbol error probability, integrated by adaptive Gauss-Hermite quadrature
// (node count doubles until the relative change is < 1e-7).
struct NoThresholdReport {
  double omega = 0.0;
  double skr = 0.0;
  int quadrature_nodes = 0;
};
NoThresholdReport no_threshold_variant(const ChannelParams& ch,
                                       std::uint64_t q, double gamma);

} // namespace rcqkd
