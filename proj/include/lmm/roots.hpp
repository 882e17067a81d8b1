#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/method.hpp"

namespace lmm {

using cplx = std::complex<double>;

struct RootTolerances {
  double root_tol = 1e-10;
  double unit_tol = 1e-9;
  double simple_tol = 1e-7;
};

/// Roots of the first characteristic polynomial.
///
/// Ordering: the root at 1 (if any) first, then by descending modulus, ties
/// broken by ascending argument. Zero roots come from stripped trailing
/// alpha coefficients and have no reciprocal.
struct RootSet {
  std::vector<double> alpha;  // coefficients the roots belong to
  std::vector<cplx> roots;
  std::vector<double> residuals;
  std::vector<std::optional<cplx>> reciprocal_roots;

  std::size_t size() const noexcept { return roots.size(); }
};

enum class Verdict { StronglyStable, WeaklyStable, RootConditionViolated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::StronglyStable: return "StronglyStable";
    case Verdict::WeaklyStable: return "WeaklyStable";
    case Verdict::RootConditionViolated: return "RootConditionViolated";
  }
  return "Unknown";
}

struct StabilityClass {
  Verdict verdict = Verdict::RootConditionViolated;
  std::vector<cplx> boundary_roots;
  bool simplicity_ok = false;
};

namespace detail {

inline cplx horner(std::span<const double> coeffs, cplx z) {
  cplx acc = 0.0;
  for (double c : coeffs) acc = acc * z + c;
  return acc;
}

inline cplx horner_derivative(std::span<const double> coeffs, cplx z) {
  const auto d = coeffs.size() - 1;
  cplx acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) acc = acc * z + coeffs[j] * static_cast<double>(d - j);
  return acc;
}

inline double residual_of(std::span<const double> alpha, cplx z) { return std::abs(horner(alpha, z)); }

// Aberth-Ehrlich simultaneous iteration on a monic polynomial given highest power first.
inline std::vector<cplx> aberth(std::span<const double> monic, int max_iter, double stop_residual,
                                bool& converged) {
  const auto d = monic.size() - 1;
  std::vector<cplx> z(d);
  double radius = 0.0;
  for (std::size_t j = 1; j <= d; ++j) radius = std::max(radius, std::abs(monic[j]));
  radius += 1.0;
  constexpr double kOffset = 0.4;  // radians
  for (std::size_t i = 0; i < d; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(d) + kOffset;
    z[i] = std::polar(radius, angle);
  }

  converged = false;
  int polish = -1;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const cplx p = horner(monic, z[i]);
      if (p == 0.0) continue;
      const cplx dp = horner_derivative(monic, z[i]);
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      }
      cplx step;
      if (dp == 0.0) {
        step = cplx(1e-8 * (1.0 + std::abs(z[i])), 0.0);
      } else {
        const cplx ratio = p / dp;
        step = ratio / (1.0 - ratio * repulsion);
      }
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
    }

    if (polish >= 0) {
      if (--polish == 0) break;
      continue;
    }
    bool small = true;
    for (const auto& zi : z) small = small && std::abs(horner(monic, zi)) <= stop_residual;
    if (small || max_step <= 1e-15) {
      converged = true;
      polish = 3;
    }
  }
  if (!converged) {
    bool ok = true;
    for (const auto& zi : z) ok = ok && std::abs(horner(monic, zi)) <= stop_residual;
    converged = ok;
  }
  return z;
}

// Replace z by a nicer nearby value (real axis, integer) when that does not worsen the residual.
inline cplx snap(std::span<const double> alpha, cplx z) {
  const double scale = 1.0 + std::abs(z);
  if (std::abs(z.imag()) <= 1e-12 * scale) {
    const cplx real_z(z.real(), 0.0);
    if (residual_of(alpha, real_z) <= residual_of(alpha, z)) z = real_z;
  }
  const cplx rounded(std::round(z.real()), std::round(z.imag()));
  if (std::abs(z - rounded) <= 1e-12 * scale && residual_of(alpha, rounded) <= residual_of(alpha, z)) {
    z = rounded;
  }
  return z;
}

}  // namespace detail

/// All complex roots of rho by Aberth iteration from deterministic start points.
/// Trailing zero alpha coefficients are stripped and reported as exact zero roots.
inline RootSet find_roots(const MultistepMethod& m, double root_tol = RootTolerances{}.root_tol,
                          int max_iter = 1000) {
  const std::vector<double> alpha(m.alpha().begin(), m.alpha().end());
  const int k = m.k();
  int zero_roots = 0;
  while (zero_roots < k && alpha[static_cast<std::size_t>(k - zero_roots)] == 0.0) ++zero_roots;
  const int degree = k - zero_roots;

  double max_alpha = 0.0;
  for (double a : alpha) max_alpha = std::max(max_alpha, std::abs(a));
  const double bound = root_tol * (1.0 + max_alpha);

  std::vector<cplx> roots;
  if (degree > 0) {
    std::vector<double> monic(static_cast<std::size_t>(degree) + 1);
    for (int j = 0; j <= degree; ++j) monic[static_cast<std::size_t>(j)] = alpha[static_cast<std::size_t>(j)] / alpha[0];
    bool converged = false;
    // The monic residual relates to rho's by the factor |alpha_0|.
    roots = detail::aberth(monic, max_iter, 1e-3 * bound / std::abs(alpha[0]), converged);
    for (auto& r : roots) r = detail::snap(alpha, r);
  }
  roots.insert(roots.end(), static_cast<std::size_t>(zero_roots), cplx(0.0, 0.0));

  auto is_one = [](cplx z) { return std::abs(z - 1.0) <= 1e-9; };
  std::stable_sort(roots.begin(), roots.end(), [&](cplx a, cplx b) {
    const bool a1 = is_one(a), b1 = is_one(b);
    if (a1 != b1) return a1;
    const double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-12 * (1.0 + std::max(ma, mb))) return ma > mb;
    return std::arg(a) < std::arg(b);
  });

  RootSet rs;
  rs.alpha = alpha;
  for (const auto& r : roots) {
    const double res = detail::residual_of(alpha, r);
    if (!(res <= bound)) {
      throw Error(ErrorCode::NoConvergence, "root finder did not meet residual bound for method '" +
                                                m.name() + "'");
    }
    rs.roots.push_back(r);
    rs.residuals.push_back(res);
    rs.reciprocal_roots.push_back(r == 0.0 ? std::nullopt : std::optional<cplx>(1.0 / r));
  }
  return rs;
}

/// Root-condition verdict with tolerances. A method without a boundary root at 1,
/// with a root outside the closed unit disk, or with a non-simple boundary root
/// is RootConditionViolated.
inline StabilityClass classify(const RootSet& rs, double unit_tol = RootTolerances{}.unit_tol,
                               double simple_tol = RootTolerances{}.simple_tol) {
  StabilityClass out;
  double abs_sum = 0.0;
  for (double a : rs.alpha) abs_sum += std::abs(a);

  bool outside = false;
  bool has_one = false;
  bool all_simple = true;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const cplx xi = rs.roots[i];
    const double mod = std::abs(xi);
    if (mod > 1.0 + unit_tol) outside = true;
    if (std::abs(mod - 1.0) > unit_tol) continue;

    out.boundary_roots.push_back(xi);
    if (std::abs(xi - 1.0) <= unit_tol) has_one = true;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rs.roots.size(); ++j) {
      if (j != i) gap = std::min(gap, std::abs(xi - rs.roots[j]));
    }
    const double slope = std::abs(detail::horner_derivative(rs.alpha, xi));
    if (!(gap > simple_tol && slope > simple_tol * abs_sum)) all_simple = false;
  }
  out.simplicity_ok = all_simple;

  if (outside || !has_one || !all_simple) {
    out.verdict = Verdict::RootConditionViolated;
  } else if (out.boundary_roots.size() == 1) {
    out.verdict = Verdict::StronglyStable;
  } else {
    out.verdict = Verdict::WeaklyStable;
  }
  return out;
}

inline StabilityClass classify(const MultistepMethod& m, const RootTolerances& tol = {}) {
  return classify(find_roots(m, tol.root_tol), tol.unit_tol, tol.simple_tol);
}

}  // namespace lmm
