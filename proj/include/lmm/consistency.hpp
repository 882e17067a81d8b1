#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/method.hpp"
#include "lmm/norms.hpp"
#include "lmm/operators.hpp"
#include "lmm/start.hpp"

namespace lmm {

/// Either a linear multistep method or the one-step alternating Euler scheme,
/// which uses f_{i-1} on odd rows and f_i on even rows.
class Scheme {
 public:
  static Scheme lmm(MultistepMethod m, StartRule rule = StartRule::ExactStart) {
    return Scheme(std::move(m), rule);
  }
  static Scheme alternating_euler(StartRule rule = StartRule::ExactStart) { return Scheme(std::nullopt, rule); }

  bool is_alternating_euler() const noexcept { return !method_; }
  const MultistepMethod& method() const { return method_.value(); }
  StartRule start_rule() const noexcept { return rule_; }
  int k() const { return method_ ? method_->k() : 1; }
  std::string name() const { return method_ ? method_->name() : "alt-euler"; }

 private:
  Scheme(std::optional<MultistepMethod> m, StartRule rule) : method_(std::move(m)), rule_(rule) {}

  std::optional<MultistepMethod> method_;
  StartRule rule_;
};

struct OrderEstimate {
  NormKind norm = NormKind::KInf;
  std::vector<int> grid_sizes;
  std::vector<double> step_sizes;
  std::vector<double> defect_norms;
  double slope = 0.0;
};

/// F_N applied to the exact solution sampled on the grid.
inline TrajectoryVector defect(const Scheme& s, const IVP& p, const GridSpec& g) {
  if (!p.has_exact()) throw Error(ErrorCode::MissingExact, "defect needs the exact solution");
  if (g.k != s.k()) throw Error(ErrorCode::InvalidArgument, "grid k does not match scheme");

  TrajectoryVector sample{std::vector<double>(static_cast<std::size_t>(g.size())), g.k};
  for (int i = 0; i < g.size(); ++i) sample.values[i] = p.exact(g.t(i));

  if (!s.is_alternating_euler()) {
    const auto bundle = make_bundle(s.method(), g, start_values(p, g, s.start_rule()));
    return apply_F(bundle, p.f, sample);
  }

  TrajectoryVector out{std::vector<double>(sample.values.size()), 1};
  const auto& u = sample.values;
  out.values[0] = u[0] - p.u0;
  for (int i = 1; i <= g.N; ++i) {
    const double diff = (u[i] - u[i - 1]) / g.h;
    out.values[i] = diff - ((i % 2 == 1) ? p.f(u[i - 1]) : p.f(u[i]));
  }
  return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(y[i] > 0.0)) return std::numeric_limits<double>::infinity();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

inline void check_n_list(const std::vector<int>& n_list, std::size_t min_size) {
  if (n_list.size() < min_size) {
    throw Error(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_size) + " grid sizes");
  }
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw Error(ErrorCode::InvalidArgument, "grid sizes must increase");
  }
}

inline OrderEstimate order_in_norm(const Scheme& s, const IVP& p, NormKind which, const std::vector<int>& n_list) {
  check_n_list(n_list, 3);
  OrderEstimate est;
  est.norm = which;
  est.grid_sizes = n_list;
  for (int n : n_list) {
    const auto g = make_grid(s.k(), n, p.T);
    const auto d = defect(s, p, g);
    est.step_sizes.push_back(g.h);
    est.defect_norms.push_back(which == NormKind::KInf ? norm_kinf(d) : norm_kspijker(d, g.h));
  }
  est.slope = loglog_slope(est.step_sizes, est.defect_norms);
  return est;
}

inline bool order_dominance_check(const Scheme& s, const IVP& p, const std::vector<int>& n_list) {
  const auto inf = order_in_norm(s, p, NormKind::KInf, n_list);
  const auto spijker = order_in_norm(s, p, NormKind::KSpijker, n_list);
  return spijker.slope >= inf.slope - 0.1;
}

}  // namespace lmm
