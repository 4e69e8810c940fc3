// Command-line front end. All real work lives in the library
// (rcqkd/cli_commands.hpp); this file only parses flags, picks the output
// stream, and maps exceptions to exit codes:
//   0 success, 2 configuration error, 3 work-budget violation.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcqkd/cli_commands.hpp"
#include "rcqkd/protocol.hpp"

namespace {

std::vector<std::uint64_t> parse_q_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string tok = s.substr(pos, comma - pos);
    if (!tok.empty()) {
      std::size_t used = 0;
      unsigned long long v = std::stoull(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument("bad q value '" + tok + "'");
      out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  using namespace rcqkd::cli;

  CLI::App app{
      "Random-codebook reconciliation tools: analytic rates, parameter "
      "search, and Monte-Carlo decoding for a Gaussian channel."};
  app.require_subcommand(1);

  // Shared flags live on the root so a config file can set them with plain
  // top-level keys (T = ..., q = ...). Each subcommand brings its own
  // defaults; only flags/config keys the user actually set override them.
  double T = 0, xi = 0, sigma_x2 = 0, gamma = 0, delta = 0;
  std::uint64_t q = 0, seed = 0, N = 0;
  unsigned b = 0;
  std::string out_path, format;

  app.add_option("--T", T, "channel transmittance, (0,1]");
  app.add_option("--xi", xi, "excess noise at the channel input");
  app.add_option("--sigma_x2", sigma_x2, "modulation variance");
  app.add_option("--q", q, "alphabet size (power of two)");
  app.add_option("--gamma", gamma, "rate-margin knob");
  app.add_option("--delta", delta, "threshold offset");
  app.add_option("--N", N, "number of blocks");
  app.add_option("--b", b, "bits per quantized symbol");
  app.add_option("--seed", seed, "master seed; fixes every random draw");
  app.add_option("--out-path", out_path, "write output to this file");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.set_config("--config", "", "read option defaults from a config file");

  OptimizeOpts opt_o;
  auto* opt = app.add_subcommand(
      "optimize", "maximize the asymptotic key rate over (sigma_x2, gamma, delta)");
  opt->fallthrough();
  opt->add_flag("--trace", opt_o.include_trace,
                "include every evaluated point (json only)");

  std::string q_list = "32,1024,32768,1048576,1073741824";
  auto* t2 = app.add_subcommand(
      "table2", "optimized operating points across alphabet sizes");
  t2->fallthrough();
  t2->add_option("--q-list", q_list,
                 "comma-separated alphabet sizes; pass '' for header only");

  SimulateOpts sim_o;
  auto* sim = app.add_subcommand("simulate",
                                 "Monte-Carlo decode over N independent blocks");
  sim->fallthrough();
  sim->add_option("--variant", sim_o.variant, "codebook realization")
      ->check(CLI::IsMember({"true-random", "pseudorandom", "gaussian-model"}));
  sim->add_flag("--prune,!--no-prune", sim_o.prune,
                "checkpoint culling in the decoder");
  sim->add_option("--defer-stage", sim_o.defer_stage,
                  "fraction of |m|^2 accumulated before deferred rejection");
  sim->add_option("--psi", sim_o.psi, "pseudorandom row expander")
      ->check(CLI::IsMember({"fast", "chacha20"}));
  sim->add_option("--element-budget", sim_o.element_budget,
                  "abort if q*N*n would exceed this");

  ScoreDistOpts sd_o;
  auto* sd = app.add_subcommand("score-dist",
                                "histogram hidden-row vs decoy scores");
  sd->fallthrough();
  sd->add_option("--true-per-block", sd_o.true_per_block,
                 "hidden-row score draws per block");
  sd->add_option("--fakes-per-block", sd_o.fakes_per_block,
                 "decoy score draws per block");
  sd->add_option("--bins", sd_o.bins, "histogram bin count");
  sd->add_option("--lo", sd_o.lo, "histogram lower edge");
  sd->add_option("--hi", sd_o.hi, "histogram upper edge");

  LeakageCurveOpts lc_o;
  auto* lc = app.add_subcommand(
      "leakage-curve", "eavesdropper-bound sweep over modulation or distance");
  lc->fallthrough();
  lc->add_option("--mode", lc_o.mode, "sigma | distance")
      ->check(CLI::IsMember({"sigma", "distance"}));
  lc->add_option("--sigma-lo", lc_o.sigma_lo, "log grid start (sigma mode)");
  lc->add_option("--sigma-hi", lc_o.sigma_hi, "log grid end (sigma mode)");
  lc->add_option("--points", lc_o.points, "grid points (sigma mode)");
  lc->add_option("--km-lo", lc_o.km_lo, "distance start, km");
  lc->add_option("--km-hi", lc_o.km_hi, "distance end, km");
  lc->add_option("--km-points", lc_o.km_points, "grid points (distance mode)");
  lc->add_option("--pulses-per-s", lc_o.pulses_per_s,
                 "repetition rate for bits/s conversion");

  LandscapeOpts ls_o;
  auto* ls = app.add_subcommand(
      "landscape", "key-rate surface over a (gamma, delta) grid");
  ls->fallthrough();
  ls->add_option("--gamma-lo", ls_o.gamma_lo, "gamma axis start");
  ls->add_option("--gamma-hi", ls_o.gamma_hi, "gamma axis end");
  ls->add_option("--delta-lo", ls_o.delta_lo, "delta axis start");
  ls->add_option("--delta-hi", ls_o.delta_hi, "delta axis end");
  ls->add_option("--gamma-steps", ls_o.gamma_steps, "gamma axis points");
  ls->add_option("--delta-steps", ls_o.delta_steps, "delta axis points");

  BenchOpts be_o;
  auto* be = app.add_subcommand("bench", "decoder throughput measurement");
  be->fallthrough();
  be->add_flag("--prune,!--no-prune", be_o.prune,
               "checkpoint culling in the decoder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2; // help/version exit clean, real errors are 2
  }

  // Per-command defaults, overridden by whatever was actually given.
  auto common = [&](CommonOpts base) {
    if (app.count("--T")) base.T = T;
    if (app.count("--xi")) base.xi = xi;
    if (app.count("--sigma_x2")) base.sigma_x2 = sigma_x2;
    if (app.count("--q")) base.q = q;
    if (app.count("--gamma")) base.gamma = gamma;
    if (app.count("--delta")) base.delta = delta;
    if (app.count("--N")) base.N = N;
    if (app.count("--b")) base.b = b;
    if (app.count("--seed")) base.seed = seed;
    if (app.count("--format")) base.format = format;
    return base;
  };

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (app.count("--out-path")) {
    file.open(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open '" << out_path << "' for writing\n";
      return 2;
    }
    os = &file;
  }

  try {
    if (*opt) {
      CommonOpts c;
      c.T = 1e-6;
      c.xi = 1e-5;
      c.q = 32;
      return cmd_optimize(common(c), opt_o, *os);
    }
    if (*t2) {
      CommonOpts c;
      c.T = 1e-6;
      c.xi = 1e-5;
      return cmd_table2(common(c), parse_q_list(q_list), *os);
    }
    if (*sim) {
      CommonOpts c; // small-alphabet desk point
      c.T = 1e-2;
      c.xi = 1e-5;
      c.sigma_x2 = 0.095;
      c.q = 32;
      c.gamma = -0.45;
      c.delta = -0.78;
      c.N = 1000;
      return cmd_simulate(common(c), sim_o, *os);
    }
    if (*sd) {
      CommonOpts c; // mid-alphabet desk point
      c.T = 1e-2;
      c.xi = 1e-5;
      c.sigma_x2 = 0.21;
      c.q = 1024;
      c.gamma = -0.28;
      c.delta = -0.50;
      c.N = 100;
      return cmd_score_dist(common(c), sd_o, *os);
    }
    if (*lc) {
      CommonOpts c;
      c.T = 1e-6;
      c.xi = lc_o.mode == "distance" ? 0.0 : 1e-5;
      c.q = 32768;
      return cmd_leakage_curve(common(c), lc_o, *os);
    }
    if (*ls) {
      CommonOpts c;
      c.T = 1e-6;
      c.xi = 1e-5;
      c.q = 1024;
      c.sigma_x2 = 0.21;
      return cmd_landscape(common(c), ls_o, *os);
    }
    if (*be) {
      CommonOpts c; // large-alphabet desk point
      c.T = 0.1;
      c.xi = 1e-5;
      c.sigma_x2 = 0.31;
      c.q = 32768;
      c.gamma = -0.21;
      c.delta = -0.40;
      c.N = 10;
      CommonOpts cc = common(c);
      be_o.blocks = cc.N;
      return cmd_bench(cc, be_o, *os);
    }
  } catch (const rcqkd::BudgetError& e) {
    std::cerr << "work budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2; // unreachable with require_subcommand(1)
}
