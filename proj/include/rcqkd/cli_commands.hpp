#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcqkd::cli {

// Flags shared by every subcommand; defaults are overridden per command in
// the binary's wiring (e.g. simulate defaults to the small-alphabet desk
// point, bench to the large-alphabet one).
struct CommonOpts {
  double T = 1e-6;
  double xi = 1e-5;
  double sigma_x2 = 0.095;
  std::uint64_t q = 32;
  double gamma = -0.45;
  double delta = -0.78;
  std::size_t N = 1000;
  unsigned b = 8;
  std::uint64_t seed = 1;
  std::string format = "csv"; // csv | json
};

struct OptimizeOpts {
  bool include_trace = false;
};

struct SimulateOpts {
  std::string variant = "true-random"; // true-random | pseudorandom | gaussian-model
  bool prune = false;
  double defer_stage = 0.5;
  std::string psi = "fast"; // fast | chacha20
  std::uint64_t element_budget = 4'000'000'000ULL;
};

struct ScoreDistOpts {
  std::size_t true_per_block = 32;
  std::size_t fakes_per_block = 256;
  int bins = 70;
  double lo = -6.0;
  double hi = 8.0;
};

struct LeakageCurveOpts {
  std::string mode = "sigma"; // sigma | distance
  double sigma_lo = 0.05;
  double sigma_hi = 100.0;
  int points = 61;
  double km_lo = 0.0;
  double km_hi = 300.0;
  int km_points = 31;
  double pulses_per_s = 1e6;
};

struct LandscapeOpts {
  double gamma_lo = -0.6;
  double gamma_hi = -0.05;
  double delta_lo = -1.2;
  double delta_hi = 0.2;
  int gamma_steps = 41;
  int delta_steps = 41;
};

struct BenchOpts {
  bool prune = true;
  std::size_t blocks = 10;
};

// Each command renders to `os` per opts.format and returns a process exit
// code. Config errors surface as std::invalid_argument / std::domain_error,
// budget violations as rcqkd::BudgetError; the binary maps those to distinct
// exit codes.
int cmd_optimize(const CommonOpts& c, const OptimizeOpts& o, std::ostream& os);
int cmd_table2(const CommonOpts& c, const std::vector<std::uint64_t>& qs,
               std::ostream& os);
int cmd_simulate(const CommonOpts& c, const SimulateOpts& o, std::ostream& os);
int cmd_score_dist(const CommonOpts& c, const ScoreDistOpts& o, std::ostream& os);
int cmd_leakage_curve(const CommonOpts& c, const LeakageCurveOpts& o,
                      std::ostream& os);
int cmd_landscape(const CommonOpts& c, const LandscapeOpts& o, std::ostream& os);
int cmd_bench(const CommonOpts& c, const BenchOpts& o, std::ostream& os);

} // namespace rcqkd::cli
