#pragma once

#include <cstdint>

namespace rcqkd {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.6931471805599453094172321;

// Standard normal CDF / upper tail / density, full double precision (erfc-based).
double norm_cdf(double x);
double norm_sf(double x);
double norm_pdf(double x);

// log Phi(x), stable into the far left tail (asymptotic expansion below x = -10).
double log_norm_cdf(double x);

// Rational approximation of Phi with |error| < 7.5e-8. The quantizer uses
// this instead of erfc to keep symbol boundaries stable across platforms.
double norm_cdf_approx(double x);

// Quantile function (inverse of norm_cdf), Wichura-style rational minimax,
// relative error ~1e-15. Backs inverse-CDF Gaussian sampling and the
// dequantization representatives, so results are libm-independent.
double inv_norm_cdf(double p);

// Binary entropy in bits; h(0) = h(1) = 0.
double binary_entropy(double p);

// Bosonic thermal-state entropy g(x) = (x+1)log2(x+1) - x log2 x, g(0) = 0.
double thermal_entropy(double x);

// log2 of the binomial coefficient C(n, k) via lgamma; exact to ~1e-14 relative.
double log2_binomial(std::uint64_t n, std::uint64_t k);

} // namespace rcqkd
