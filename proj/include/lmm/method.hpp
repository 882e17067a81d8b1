#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmm/error.hpp"

namespace lmm {

/// A k-step linear multistep method
///
///   (1/h) sum_j alpha_j u_{i-j} = sum_j beta_j f(u_{i-j}),   j = 0..k
///
/// Index j = 0 is the newest time level. Coefficients are kept exactly as
/// supplied; there is no normalization of alpha_0.
class MultistepMethod {
 public:
  const std::string& name() const noexcept { return name_; }
  int k() const noexcept { return static_cast<int>(alpha_.size()) - 1; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  std::span<const double> beta() const noexcept { return beta_; }
  double alpha(int j) const { return alpha_.at(static_cast<std::size_t>(j)); }
  double beta(int j) const { return beta_.at(static_cast<std::size_t>(j)); }
  bool explicit_method() const noexcept { return beta_.front() == 0.0; }

  friend bool operator==(const MultistepMethod&, const MultistepMethod&) = default;

 private:
  MultistepMethod(std::string name, std::vector<double> alpha, std::vector<double> beta)
      : name_(std::move(name)), alpha_(std::move(alpha)), beta_(std::move(beta)) {}

  friend MultistepMethod make_method(std::string name, std::vector<double> alpha,
                                     std::vector<double> beta);

  std::string name_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

inline MultistepMethod make_method(std::string name, std::vector<double> alpha,
                                   std::vector<double> beta) {
  if (alpha.size() != beta.size()) {
    throw Error(ErrorCode::LengthMismatch, "alpha has " + std::to_string(alpha.size()) +
                                               " entries, beta has " +
                                               std::to_string(beta.size()));
  }
  if (alpha.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a method needs at least two coefficients (k >= 1)");
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!std::isfinite(alpha[j]) || !std::isfinite(beta[j])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coefficient at index " + std::to_string(j));
    }
  }
  if (alpha.front() == 0.0) {
    throw Error(ErrorCode::ZeroLeadingAlpha, "alpha_0 must be nonzero for method '" + name + "'");
  }
  return MultistepMethod(std::move(name), std::move(alpha), std::move(beta));
}

/// Built-in methods. `midpoint` and `milne` are weakly stable, the rest strongly stable.
inline std::vector<MultistepMethod> catalog() {
  return {
      make_method("midpoint", {0.5, 0.0, -0.5}, {0.0, 1.0, 0.0}),
      make_method("euler", {1.0, -1.0}, {0.0, 1.0}),
      make_method("implicit-euler", {1.0, -1.0}, {1.0, 0.0}),
      make_method("trapezoidal", {1.0, -1.0}, {0.5, 0.5}),
      make_method("AB2", {1.0, -1.0, 0.0}, {0.0, 1.5, -0.5}),
      make_method("BDF2", {1.5, -2.0, 0.5}, {1.0, 0.0, 0.0}),
      make_method("milne", {1.0, 0.0, -1.0}, {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0}),
  };
}

inline std::optional<MultistepMethod> find_method(const std::string& name) {
  for (auto& m : catalog()) {
    if (m.name() == name) return m;
  }
  return std::nullopt;
}

/// First characteristic polynomial rho(z) = sum_j alpha_j z^{k-j} (Horner).
inline std::complex<double> rho_eval(const MultistepMethod& m, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (double a : m.alpha()) acc = acc * z + a;
  return acc;
}

inline std::complex<double> rho_derivative(const MultistepMethod& m, std::complex<double> z) {
  const int k = m.k();
  std::complex<double> acc = 0.0;
  for (int j = 0; j < k; ++j) acc = acc * z + m.alpha(j) * static_cast<double>(k - j);
  return acc;
}

/// Scalar autonomous initial value problem u' = f(u), u(0) = u0 on [0, T].
struct IVP {
  std::function<double(double)> f;
  double u0 = 0.0;
  double T = 1.0;
  std::function<double(double)> exact;  // empty when unknown
  std::optional<double> lipschitz_hint;

  bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

inline IVP make_ivp(std::function<double(double)> f, double u0, double T,
                    std::function<double(double)> exact = {},
                    std::optional<double> lipschitz_hint = std::nullopt) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
  if (lipschitz_hint && !(*lipschitz_hint > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lipschitz hint must be positive");
  }
  if (exact && std::abs(exact(0.0) - u0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "exact(0) does not match u0");
  }
  return IVP{std::move(f), u0, T, std::move(exact), lipschitz_hint};
}

// Closed-form test problems.
inline IVP growth_ivp(double T = 1.0) {
  return make_ivp([](double u) { return u; }, 1.0, T, [](double t) { return std::exp(t); }, 1.0);
}
inline IVP decay_ivp(double T = 1.0) {
  return make_ivp([](double u) { return -u; }, 1.0, T, [](double t) { return std::exp(-t); }, 1.0);
}
inline IVP constant_rate_ivp(double c, double u0 = 0.0, double T = 1.0) {
  return make_ivp([c](double) { return c; }, u0, T, [c, u0](double t) { return u0 + c * t; });
}

/// Uniform grid with k start levels and n computed levels: N = k + n - 1, h = T / N.
struct GridSpec {
  int k = 1;
  int n = 1;
  int N = 1;
  double h = 1.0;
  double T = 1.0;

  int size() const noexcept { return k + n; }
  double t(int i) const noexcept { return T * static_cast<double>(i) / static_cast<double>(N); }
};

inline GridSpec make_grid(int k, int n, double T = 1.0) {
  if (k < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "grid needs k >= 1 and n >= 1");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
  const int N = k + n - 1;
  return GridSpec{k, n, N, T / static_cast<double>(N), T};
}

}  // namespace lmm
