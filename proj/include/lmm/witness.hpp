#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/norms.hpp"
#include "lmm/operators.hpp"
#include "lmm/roots.hpp"

namespace lmm {

enum class WitnessCase { Real, Complex };

inline const char* to_string(WitnessCase c) { return c == WitnessCase::Real ? "real" : "complex"; }

struct WitnessReport {
  std::string method;
  int n = 0;
  double h = 0.0;
  cplx xi2;
  WitnessCase which = WitnessCase::Real;
  std::vector<double> w;
  double u_inf_norm = 0.0;          // ||E_n^{-1} w||_inf = ||w||_$
  double image_spijker_norm = 0.0;  // ||A_n E_n^{-1} w||_$
  double ratio = 0.0;               // lower bound for the stability constant
};

struct WitnessDiagnostics {
  WitnessCase which = WitnessCase::Real;
  double image_vector_deviation = 0.0;  // against xi^m, or the cosine telescoping
  double closed_form_deviation = 0.0;   // prefix sums vs closed-form partial sums
  double w_spijker_norm = 0.0;
  double w_lower_bound = 0.0;           // h (n - 1) / 2 in the real case, 0 otherwise
  double factor_image_norm = 0.0;       // ||(I - xi2 H) w||_$ or ||(I - 2cos(phi) H + H^2) w||_$
  double h = 0.0;
};

struct RatioSweep {
  std::string method;
  cplx xi2;
  WitnessCase which = WitnessCase::Real;
  std::vector<WitnessReport> rows;
  bool monotone = false;
  double min_ratio = 0.0;
};

/// Alternating ramp for k = 2: (0, 0, 1, -2, 3, -4, ...), u_l = (l - 1)(-1)^l.
inline TrajectoryVector spijker_witness(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Spijker witness needs n >= 2");
  std::vector<double> u(static_cast<std::size_t>(n) + 2, 0.0);
  for (int l = 2; l <= n + 1; ++l) u[l] = static_cast<double>(l - 1) * ((l % 2 == 0) ? 1.0 : -1.0);
  return TrajectoryVector{std::move(u), 2};
}

/// Boundary root other than 1 that drives the witness: -1 if present, otherwise
/// the one with the smallest positive argument.
inline cplx select_boundary_root(const RootSet& rs, const RootTolerances& tol = {}) {
  const auto cls = classify(rs, tol.unit_tol, tol.simple_tol);
  if (cls.verdict != Verdict::WeaklyStable) {
    throw Error(ErrorCode::NotWeaklyStable, std::string("witness needs a weakly stable method, got ") +
                                                to_string(cls.verdict));
  }
  const cplx* pick = nullptr;
  for (const auto& xi : cls.boundary_roots) {
    if (std::abs(xi + 1.0) <= tol.unit_tol) return cplx(-1.0, 0.0);
    const double phi = std::arg(xi);
    if (phi > tol.unit_tol && (!pick || phi < std::arg(*pick))) pick = &xi;
  }
  if (!pick) throw Error(ErrorCode::NotWeaklyStable, "no usable boundary root besides 1");
  return *pick;
}

namespace detail {

inline WitnessCase case_of(cplx xi2) { return xi2 == cplx(-1.0, 0.0) ? WitnessCase::Real : WitnessCase::Complex; }

// cos(m phi) with the rounding of m * phi compensated.
inline double cos_multiple(int m, double phi) {
  const double a = static_cast<double>(m) * phi;
  const double err = std::fma(static_cast<double>(m), phi, -a);
  return std::cos(a) - std::sin(a) * err;
}

// w_m = m Re(xi2^m), m = 1..n.
inline std::vector<double> witness_w(cplx xi2, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  const bool real = case_of(xi2) == WitnessCase::Real;
  const double phi = std::arg(xi2);
  for (int m = 1; m <= n; ++m) {
    const double re = real ? ((m % 2 == 0) ? 1.0 : -1.0) : cos_multiple(m, phi);
    w[m - 1] = static_cast<double>(m) * re;
  }
  return w;
}

}  // namespace detail

inline WitnessReport weak_witness(const MultistepMethod& m, const RootSet& rs, int n, double T = 1.0) {
  const cplx xi2 = select_boundary_root(rs);
  if (n < m.k()) throw Error(ErrorCode::InvalidArgument, "witness needs n >= k");
  const auto bundle = make_bundle(m, n, T);
  const double h = bundle.grid.h;

  WitnessReport r;
  r.method = m.name();
  r.n = n;
  r.h = h;
  r.xi2 = xi2;
  r.which = detail::case_of(xi2);
  r.w = detail::witness_w(xi2, n);
  const auto u = apply_E_inv(r.w, h);
  r.u_inf_norm = sup_norm(u);
  r.image_spijker_norm = spijker_seminorm(apply_A_interior(bundle, u), h);
  r.ratio = r.u_inf_norm / r.image_spijker_norm;
  return r;
}

inline WitnessReport weak_witness(const MultistepMethod& m, int n, double T = 1.0) {
  return weak_witness(m, find_roots(m), n, T);
}

inline WitnessDiagnostics witness_diagnostics(const MultistepMethod& m, const RootSet& rs, int n, double T = 1.0) {
  const cplx xi2 = select_boundary_root(rs);
  if (n < m.k()) throw Error(ErrorCode::InvalidArgument, "witness needs n >= k");
  const double h = make_grid(m.k(), n, T).h;
  const auto w = detail::witness_w(xi2, n);
  const std::span<const double> ws(w);

  WitnessDiagnostics d;
  d.which = detail::case_of(xi2);
  d.h = h;
  const double phi = std::arg(xi2);

  if (d.which == WitnessCase::Real) {
    const auto image = apply_real_shift_factor(-1.0, ws);
    for (int mm = 1; mm <= n; ++mm) {
      const double target = (mm % 2 == 0) ? 1.0 : -1.0;
      d.image_vector_deviation = std::max(d.image_vector_deviation, std::abs(image[mm - 1] - target));
    }
    d.factor_image_norm = spijker_seminorm(image, h);
    d.w_lower_bound = h * static_cast<double>(n - 1) / 2.0;
  } else {
    const double c = std::cos(phi);
    const auto once = apply_real_shift_factor(c, ws);
    auto image = apply_real_shift_factor(c, std::span<const double>(once));
    // (I - cH)^2 = I - 2cH + c^2 H^2; add back (1 - c^2) H^2 w.
    for (int i = 2; i < n; ++i) image[i] += (1.0 - c * c) * w[i - 2];
    for (int mm = 1; mm <= n; ++mm) {
      const double target = (mm == 1) ? c : detail::cos_multiple(mm, phi) - detail::cos_multiple(mm - 2, phi);
      d.image_vector_deviation = std::max(d.image_vector_deviation, std::abs(image[mm - 1] - target));
    }
    d.factor_image_norm = spijker_seminorm(image, h);
  }

  d.w_spijker_norm = spijker_seminorm(w, h);
  double closed = 0.0;
  for (int l = 1; l <= n; ++l) {
    const cplx pow_l1 = (d.which == WitnessCase::Real) ? cplx((l % 2 == 0) ? -1.0 : 1.0, 0.0)
                                                        : std::polar(1.0, (l + 1) * phi);
    const cplx xi = (d.which == WitnessCase::Real) ? cplx(-1.0, 0.0) : std::polar(1.0, phi);
    const cplx partial = static_cast<double>(l) * pow_l1 / (xi - 1.0) - (pow_l1 - xi) / ((xi - 1.0) * (xi - 1.0));
    closed = std::max(closed, std::abs(partial.real()));
  }
  d.closed_form_deviation = std::abs(h * closed - d.w_spijker_norm);
  return d;
}

inline RatioSweep ratio_sweep(const MultistepMethod& m, const RootSet& rs, const std::vector<int>& n_list,
                              double T = 1.0) {
  RatioSweep s;
  s.method = m.name();
  s.xi2 = select_boundary_root(rs);
  s.which = detail::case_of(s.xi2);
  for (int n : n_list) s.rows.push_back(weak_witness(m, rs, n, T));
  s.monotone = !s.rows.empty();
  s.min_ratio = s.rows.empty() ? 0.0 : s.rows.front().ratio;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    if (!(s.rows[i].ratio > s.rows[i - 1].ratio)) s.monotone = false;
    s.min_ratio = std::min(s.min_ratio, s.rows[i].ratio);
  }
  return s;
}

}  // namespace lmm
