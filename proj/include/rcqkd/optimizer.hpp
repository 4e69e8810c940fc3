#pragma once

#include <cstdint>
#include <vector>

#include "rcqkd/analytics.hpp"
#include "rcqkd/channel.hpp"

namespace rcqkd {

// Search box for (sigma_x2, gamma, delta). Defaults bracket every reference
// operating point with margin.
struct SearchBounds {
  double sx2_lo = 0.01, sx2_hi = 5.0;
  double gamma_lo = -0.9, gamma_hi = 0.5;
  double delta_lo = -3.0, delta_hi = 1.0;
};

struct SearchConfig {
  SearchBounds bounds{};
  int grid_points = 20;        // per axis, cell-centered
  double round_rel_tol = 1e-4; // stop when a refinement round gains less
  int max_rounds = 30;
  std::size_t trace_cap = 200000;
};

struct EvalPoint {
  double sigma_x2 = 0.0, gamma = 0.0, delta = 0.0;
  double skr = 0.0;
};

struct OptimizationResult {
  EvalPoint best{};
  double skr_over_dw = 0.0;
  ChannelParams ch{};
  OperatingPoint op{};
  ErrorProbs probs{};
  RateReport rates{};
  bool hit_lo[3] = {false, false, false}; // sigma_x2, gamma, delta
  bool hit_hi[3] = {false, false, false};
  bool converged = false;
  int rounds = 0;
  std::size_t evals = 0;
  std::vector<EvalPoint> trace; // every evaluated point; best.skr >= all
};

// Analytic asymptotic key rate at one parameter point (bits per use).
// Propagates domain errors from the channel/leakage layer.
double skr_eval(double T, double xi, std::uint64_t q, double sigma_x2,
                double gamma, double delta);

// Deterministic two-phase maximization: cell-centered coarse grid, then
// repeated Nelder-Mead rounds with shrinking initial steps until a round
// improves the objective by less than round_rel_tol relative. No randomness,
// so reruns are bit-identical. Grid ties break toward smaller sigma_x2.
OptimizationResult optimize_skr(double T, double xi, std::uint64_t q,
                                const SearchConfig& config = {});

// Dense (gamma, delta) slice of SKR/DW at fixed sigma_x2, row-major in gamma.
// Unphysical cells come back as NaN.
struct LandscapeGrid {
  double sigma_x2 = 0.0;
  std::vector<double> gammas;
  std::vector<double> deltas;
  std::vector<double> skr_over_dw; // gammas.size() * deltas.size()
};

LandscapeGrid landscape_slice(double T, double xi, std::uint64_t q,
                              double sigma_x2, double gamma_lo, double gamma_hi,
                              int gamma_steps, double delta_lo, double delta_hi,
                              int delta_steps);

} // namespace rcqkd
