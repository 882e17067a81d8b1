#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/method.hpp"
#include "lmm/norms.hpp"
#include "lmm/operators.hpp"
#include "lmm/start.hpp"

namespace lmm {

struct SolveOptions {
  double solve_tol = 1e-12;
  int max_newton = 50;
  double bracket_width = 1.0;
};

struct RunResult {
  GridSpec grid;
  TrajectoryVector trajectory;
  std::vector<int> newton_iters;  // per computed level; zeros for explicit methods
  std::vector<double> start_values;
};

struct OscillationResult {
  RunResult run;
  std::vector<double> envelope;  // |u_j - exact(t_j)|
  double parasitic_amplitude = 0.0;
};

namespace detail {

// Solves alpha0 u - h beta0 f(u) = rhs (the level equation multiplied by h).
inline double solve_level(double alpha0, double beta0, double h, const std::function<double(double)>& f,
                          double rhs, double guess, const SolveOptions& opt, int& iters) {
  auto g = [&](double u) { return alpha0 * u - h * beta0 * f(u) - rhs; };
  // Level residual of F_N is g / h.
  auto tol = [&](double u) { return h * opt.solve_tol * (1.0 + std::abs(u)); };

  double u = guess;
  double gu = g(u);
  iters = 0;
  while (iters < opt.max_newton && std::abs(gu) > tol(u)) {
    ++iters;
    const double d = 1e-7 * (1.0 + std::abs(u));
    const double slope = (g(u + d) - g(u - d)) / (2.0 * d);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    double step = gu / slope;
    double trial = u - step;
    double gt = g(trial);
    for (int halvings = 0; halvings < 30 && !(std::abs(gt) < std::abs(gu)); ++halvings) {
      step *= 0.5;
      trial = u - step;
      gt = g(trial);
    }
    if (!std::isfinite(gt)) break;
    const bool stalled = std::abs(trial - u) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(u));
    u = trial;
    gu = gt;
    if (stalled) break;
  }
  if (std::isfinite(gu) && std::abs(gu) <= tol(u)) return u;
  if (std::isfinite(gu) && std::abs(gu) <= 16.0 * std::numeric_limits<double>::epsilon() *
                                               (std::abs(alpha0 * u) + std::abs(h * beta0 * f(u)) + std::abs(rhs))) {
    return u;  // at the rounding floor
  }

  // Bisection on a bracket around the guess.
  double lo = guess - 0.5 * opt.bracket_width, hi = guess + 0.5 * opt.bracket_width;
  double glo = g(lo), ghi = g(hi);
  if (!(std::isfinite(glo) && std::isfinite(ghi)) || glo * ghi > 0.0) {
    throw Error(ErrorCode::NewtonDiverged, "implicit level solve failed and no sign change in bracket");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    ++iters;
    if (std::abs(gm) <= tol(mid) || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(mid))) {
      return mid;
    }
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline RunResult run_with_start(const MultistepMethod& m, const IVP& p, const GridSpec& g, std::vector<double> c,
                                const SolveOptions& opt) {
  const int k = m.k();
  RunResult r{g, TrajectoryVector{std::vector<double>(static_cast<std::size_t>(g.size())), k}, {}, c};
  auto& u = r.trajectory.values;
  std::vector<double> fu(u.size());
  for (int i = 0; i < k; ++i) {
    u[i] = c[i];
    fu[i] = p.f(u[i]);
  }
  const double a0 = m.alpha(0), b0 = m.beta(0);
  for (int i = k; i < g.size(); ++i) {
    double rhs = 0.0;
    for (int j = 1; j <= k; ++j) rhs += g.h * m.beta(j) * fu[i - j] - m.alpha(j) * u[i - j];
    int iters = 0;
    if (b0 == 0.0) {
      u[i] = rhs / a0;
    } else {
      u[i] = solve_level(a0, b0, g.h, p.f, rhs, u[i - 1], opt, iters);
    }
    fu[i] = p.f(u[i]);
    r.newton_iters.push_back(iters);
  }
  return r;
}

}  // namespace detail

inline RunResult integrate(const MultistepMethod& m, const IVP& p, const GridSpec& g,
                           StartRule rule = StartRule::ExactStart, const SolveOptions& opt = {}) {
  if (g.k != m.k()) throw Error(ErrorCode::InvalidArgument, "grid k does not match method k");
  return detail::run_with_start(m, p, g, start_values(p, g, rule), opt);
}

/// ||F_N(trajectory)||_inf, the quantity bounded by solve_tol (1 + ||u||_inf).
inline double run_residual(const MultistepMethod& m, const IVP& p, const RunResult& r) {
  const auto bundle = make_bundle(m, r.grid, r.start_values);
  return sup_norm<double>(std::span<const double>(apply_F(bundle, p.f, r.trajectory).values));
}

/// Two-step run whose second start value is perturbed; measures the spurious mode.
inline OscillationResult oscillation_demo(const MultistepMethod& m, const IVP& p, const GridSpec& g,
                                          double perturbation, const SolveOptions& opt = {}) {
  if (m.k() != 2) throw Error(ErrorCode::InvalidArgument, "oscillation demo needs a two-step method");
  if (g.k != 2) throw Error(ErrorCode::InvalidArgument, "grid k does not match method k");
  if (!p.has_exact()) throw Error(ErrorCode::StartUnavailable, "oscillation demo needs the exact solution");

  OscillationResult out;
  out.run = detail::run_with_start(m, p, g, {p.exact(0.0), p.exact(g.h) + perturbation}, opt);
  const auto& u = out.run.trajectory.values;
  out.envelope.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out.envelope[j] = std::abs(u[j] - p.exact(g.t(static_cast<int>(j))));

  const int size = g.size();
  const int from = std::max(1, size - size / 4);
  for (int j = from; j < size; ++j) {
    const double ej = u[j] - p.exact(g.t(j));
    const double ej1 = u[j - 1] - p.exact(g.t(j - 1));
    out.parasitic_amplitude = std::max(out.parasitic_amplitude, std::abs(ej - ej1) / 2.0);
  }
  return out;
}

}  // namespace lmm
