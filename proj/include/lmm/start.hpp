#pragma once

#include <vector>

#include "lmm/error.hpp"
#include "lmm/method.hpp"

namespace lmm {

enum class StartRule { ExactStart, RK4Bootstrap };

inline const char* to_string(StartRule r) { return r == StartRule::ExactStart ? "exact" : "rk4"; }

/// One classical RK4 step for the autonomous scalar problem.
inline double rk4_step(const IVP& p, double u, double h) {
  const double k1 = p.f(u);
  const double k2 = p.f(u + 0.5 * h * k1);
  const double k3 = p.f(u + 0.5 * h * k2);
  const double k4 = p.f(u + h * k3);
  return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// c^0 .. c^{k-1} on the grid: sampled from the exact solution, or RK4 from u0
/// with `substeps` steps per grid interval.
inline std::vector<double> start_values(const IVP& p, const GridSpec& g, StartRule rule, int substeps = 1) {
  std::vector<double> c(static_cast<std::size_t>(g.k));
  if (rule == StartRule::ExactStart) {
    if (!p.has_exact()) throw Error(ErrorCode::StartUnavailable, "exact start requested but no exact solution");
    for (int i = 0; i < g.k; ++i) c[i] = p.exact(g.t(i));
    return c;
  }
  c[0] = p.u0;
  const double dt = g.h / substeps;
  double u = p.u0;
  for (int i = 1; i < g.k; ++i) {
    for (int s = 0; s < substeps; ++s) u = rk4_step(p, u, dt);
    c[i] = u;
  }
  return c;
}

}  // namespace lmm
