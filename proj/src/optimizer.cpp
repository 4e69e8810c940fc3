#include "rcqkd/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcqkd/math_util.hpp"

namespace rcqkd {

double skr_eval(double T, double xi, std::uint64_t q, double sigma_x2,
                double gamma, double delta) {
  const ChannelParams ch = derive_channel(T, xi, sigma_x2);
  const ErrorProbs probs = error_probs(q, gamma, delta);
  const double i_xy = mutual_info_xy(ch);
  const double i_ey = leakage_ey(ch);
  if (probs.p_acc <= 0.0) return 0.0;
  const double log2q = std::log2(static_cast<double>(q));
  const double bracket =
      (1.0 + gamma) * i_xy *
      (1.0 - binary_entropy(probs.ber) -
       binary_entropy(probs.p_acc) / (probs.p_acc * log2q));
  return probs.p_acc * (bracket - i_ey);
}

namespace {

constexpr double kBad = -std::numeric_limits<double>::infinity();

struct Box {
  std::array<double, 3> lo, hi;
};

struct Objective {
  double T, xi;
  std::uint64_t q;
  Box box;
  const SearchConfig* cfg;
  std::vector<EvalPoint>* trace;
  std::size_t evals = 0;

  std::array<double, 3> to_params(const std::array<double, 3>& z) const {
    return {box.lo[0] + z[0] * (box.hi[0] - box.lo[0]),
            box.lo[1] + z[1] * (box.hi[1] - box.lo[1]),
            box.lo[2] + z[2] * (box.hi[2] - box.lo[2])};
  }

  double operator()(const std::array<double, 3>& z) {
    for (double v : z)
      if (v < 0.0 || v > 1.0) return kBad;
    const auto p = to_params(z);
    double f;
    try {
      f = skr_eval(T, xi, q, p[0], p[1], p[2]);
    } catch (const std::exception&) {
      return kBad;
    }
    ++evals;
    if (trace->size() < cfg->trace_cap) trace->push_back({p[0], p[1], p[2], f});
    return f;
  }
};

struct Vertex {
  std::array<double, 3> z;
  double f;
};

// Deterministic Nelder-Mead on the unit cube; returns the best vertex.
Vertex nelder_mead(Objective& obj, std::array<double, 3> start, double step) {
  std::array<Vertex, 4> s;
  s[0] = {start, obj(start)};
  for (int d = 0; d < 3; ++d) {
    auto z = start;
    z[d] = z[d] + step <= 1.0 ? z[d] + step : z[d] - step;
    s[d + 1] = {z, obj(z)};
  }
  auto order = [&s] {
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
  };
  order();
  for (int it = 0; it < 500; ++it) {
    // Convergence: simplex flat in value and tiny in extent.
    double fspread = 0.0, xspread = 0.0;
    for (int i = 1; i < 4; ++i) {
      fspread = std::max(fspread, std::fabs(s[0].f - s[i].f));
      for (int d = 0; d < 3; ++d)
        xspread = std::max(xspread, std::fabs(s[0].z[d] - s[i].z[d]));
    }
    if (fspread <= 1e-15 * (std::fabs(s[0].f) + 1e-300) && xspread <= 1e-11)
      break;

    std::array<double, 3> centroid{};
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 3; ++d) centroid[d] += s[i].z[d] / 3.0;
    auto lerp = [&](double t) {
      std::array<double, 3> z;
      for (int d = 0; d < 3; ++d)
        z[d] = centroid[d] + t * (centroid[d] - s[3].z[d]);
      return z;
    };

    const auto zr = lerp(1.0);
    const double fr = obj(zr);
    if (fr > s[0].f) {
      const auto ze = lerp(2.0);
      const double fe = obj(ze);
      s[3] = fe > fr ? Vertex{ze, fe} : Vertex{zr, fr};
    } else if (fr > s[2].f) {
      s[3] = {zr, fr};
    } else {
      const bool outside = fr > s[3].f;
      const auto zc = lerp(outside ? 0.5 : -0.5);
      const double fc = obj(zc);
      if (fc > (outside ? fr : s[3].f)) {
        s[3] = {zc, fc};
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int d = 0; d < 3; ++d)
            s[i].z[d] = s[0].z[d] + 0.5 * (s[i].z[d] - s[0].z[d]);
          s[i].f = obj(s[i].z);
        }
      }
    }
    order();
  }
  return s[0];
}

} // namespace

OptimizationResult optimize_skr(double T, double xi, std::uint64_t q,
                                const SearchConfig& config) {
  if (q < 2 || (q & (q - 1)) != 0)
    throw std::invalid_argument("optimize_skr: q must be a power of 2, >= 2");
  if (config.grid_points < 1)
    throw std::invalid_argument("optimize_skr: grid_points must be >= 1");

  OptimizationResult res;
  Objective obj{T,
                xi,
                q,
                {{config.bounds.sx2_lo, config.bounds.gamma_lo, config.bounds.delta_lo},
                 {config.bounds.sx2_hi, config.bounds.gamma_hi, config.bounds.delta_hi}},
                &config,
                &res.trace};

  // Cell-centered coarse scan. sigma_x2 is the outer loop and equal values
  // never displace the incumbent, so ties resolve to the smallest sigma_x2.
  const int G = config.grid_points;
  Vertex best{{0.5, 0.5, 0.5}, kBad};
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j)
      for (int k = 0; k < G; ++k) {
        const std::array<double, 3> z = {(i + 0.5) / G, (j + 0.5) / G,
                                         (k + 0.5) / G};
        const double f = obj(z);
        if (f > best.f) best = {z, f};
      }

  // Refinement rounds with shrinking initial simplex.
  double step = 0.08;
  for (int r = 0; r < config.max_rounds; ++r) {
    const Vertex v = nelder_mead(obj, best.z, step);
    const double gain = v.f - best.f;
    if (v.f > best.f) best = v;
    res.rounds = r + 1;
    if (gain < config.round_rel_tol * std::max(std::fabs(best.f), 1e-300)) {
      res.converged = true;
      break;
    }
    step *= 0.35;
  }

  const auto p = obj.to_params(best.z);
  res.best = {p[0], p[1], p[2], best.f};
  res.evals = obj.evals;
  res.ch = derive_channel(T, xi, p[0]);
  res.probs = error_probs(q, p[1], p[2]);
  try {
    res.op = derive_operating_point(res.ch, q, p[1], p[2]);
  } catch (const std::exception&) {
    // Block length degenerate at this point (huge eps / tiny q); rates below
    // don't need it.
    res.op.q = q;
    res.op.gamma = p[1];
    res.op.delta = p[2];
  }
  res.rates = skr_infinity(res.ch, res.op, res.probs);
  res.skr_over_dw = res.rates.skr_over_dw;

  const double* lo = &obj.box.lo[0];
  const double* hi = &obj.box.hi[0];
  for (int d = 0; d < 3; ++d) {
    const double range = hi[d] - lo[d];
    res.hit_lo[d] = p[d] - lo[d] < 1e-3 * range;
    res.hit_hi[d] = hi[d] - p[d] < 1e-3 * range;
  }
  return res;
}

LandscapeGrid landscape_slice(double T, double xi, std::uint64_t q,
                              double sigma_x2, double gamma_lo, double gamma_hi,
                              int gamma_steps, double delta_lo, double delta_hi,
                              int delta_steps) {
  if (gamma_steps < 1 || delta_steps < 1)
    throw std::invalid_argument("landscape_slice: resolution must be positive");
  LandscapeGrid grid;
  grid.sigma_x2 = sigma_x2;
  const double dw = devetak_winter_bound(T);
  auto axis = [](double lo, double hi, int steps) {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i)
     v[i] = steps == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (steps - 1);
    return v;
  };
  grid.gammas = axis(gamma_lo, gamma_hi, gamma_steps);
  grid.deltas = axis(delta_lo, delta_hi, delta_steps);
  grid.skr_over_dw.resize(grid.gammas.size() * grid.deltas.size());
  for (std::size_t i = 0; i < grid.gammas.size(); ++i)
    for (std::size_t j = 0; j < grid.deltas.size(); ++j) {
      double v;
      try {
        v = skr_eval(T, xi, q, sigma_x2, grid.gammas[i], grid.deltas[j]) / dw;
      } catch (const std::exception&) {
        v = std::numeric_limits<double>::quiet_NaN();
      }
      grid.skr_over_dw[i * grid.deltas.size() + j] = v;
    }
  return grid;
}

} // namespace rcqkd
