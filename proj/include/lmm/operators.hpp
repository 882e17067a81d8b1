#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/method.hpp"
#include "lmm/roots.hpp"

namespace lmm {

/// Grid values u_0 .. u_N split into the k start levels and the n computed levels.
struct TrajectoryVector {
  std::vector<double> values;
  int k = 1;

  int n() const noexcept { return static_cast<int>(values.size()) - k; }
  std::span<const double> head() const { return std::span<const double>(values).first(static_cast<std::size_t>(k)); }
  std::span<const double> tail() const { return std::span<const double>(values).subspan(static_cast<std::size_t>(k)); }
  std::span<double> tail() { return std::span<double>(values).subspan(static_cast<std::size_t>(k)); }
};

inline TrajectoryVector make_trajectory(std::vector<double> values, int k) {
  if (k < 0 || static_cast<int>(values.size()) < k) {
    throw Error(ErrorCode::InvalidArgument, "trajectory shorter than its start block");
  }
  return TrajectoryVector{std::move(values), k};
}

/// The discrete operator F_N(u) = A_N u - B_N f(u) - c_N for one method on one grid.
struct OperatorBundle {
  MultistepMethod method;
  GridSpec grid;
  std::vector<double> start_values;  // c^0 .. c^{k-1}
};

inline OperatorBundle make_bundle(const MultistepMethod& m, const GridSpec& g,
                                  std::vector<double> start_values = {}) {
  if (g.k != m.k()) {
    throw Error(ErrorCode::InvalidArgument, "grid step number " + std::to_string(g.k) +
                                                " does not match method k = " + std::to_string(m.k()));
  }
  if (start_values.empty()) start_values.assign(static_cast<std::size_t>(m.k()), 0.0);
  if (static_cast<int>(start_values.size()) != m.k()) {
    throw Error(ErrorCode::LengthMismatch, "need exactly k start values");
  }
  return OperatorBundle{m, g, std::move(start_values)};
}

inline OperatorBundle make_bundle(const MultistepMethod& m, int n, double T = 1.0) {
  return make_bundle(m, make_grid(m.k(), n, T));
}

/// Matrix-free F_N in O(kN).
inline TrajectoryVector apply_F(const OperatorBundle& b, const std::function<double(double)>& f,
                                const TrajectoryVector& u) {
  const int k = b.grid.k;
  const int size = b.grid.size();
  if (u.k != k || static_cast<int>(u.values.size()) != size) {
    throw Error(ErrorCode::LengthMismatch, "trajectory length does not match grid");
  }
  std::vector<double> fu(u.values.size());
  for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = f(u.values[i]);

  TrajectoryVector out{std::vector<double>(u.values.size()), k};
  for (int i = 0; i < k; ++i) out.values[i] = u.values[i] - b.start_values[i];
  const double inv_h = 1.0 / b.grid.h;
  for (int i = k; i < size; ++i) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j <= k; ++j) {
      sa += b.method.alpha(j) * u.values[i - j];
      sb += b.method.beta(j) * fu[i - j];
    }
    out.values[i] = inv_h * sa - sb;
  }
  return out;
}

/// A_n v for the interior block, with the start block taken as zero.
template <typename T>
std::vector<T> apply_A_interior(const OperatorBundle& b, std::span<const T> v) {
  const int k = b.grid.k;
  const int n = static_cast<int>(v.size());
  const double inv_h = 1.0 / b.grid.h;
  std::vector<T> out(v.size(), T(0));
  for (int i = 0; i < n; ++i) {
    T acc(0);
    for (int j = 0; j <= k && j <= i; ++j) acc += b.method.alpha(j) * v[i - j];
    out[i] = inv_h * acc;
  }
  return out;
}

inline std::vector<double> apply_A_interior(const OperatorBundle& b, const std::vector<double>& v) {
  return apply_A_interior<double>(b, std::span<const double>(v));
}

// ---------------------------------------------------------------------------
// Dense materialization

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
    for (int i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (int j = 0; j < cols; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }
};

inline constexpr int kDefaultDenseCap = 4096;

/// Largest k + n for dense work. LMM_DENSE_CAP overrides the default.
inline int dense_cap() {
  if (const char* env = std::getenv("LMM_DENSE_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return kDefaultDenseCap;
}

namespace detail {

inline void check_cap(const GridSpec& g, int cap) {
  if (g.size() > cap) {
    throw Error(ErrorCode::SizeExceeded, "k + n = " + std::to_string(g.size()) +
                                             " exceeds dense cap " + std::to_string(cap));
  }
}

}  // namespace detail

/// A_N = [[I, 0], [A_k, A_n]] with the (1/h) alpha band below the start block.
inline DenseMatrix dense_A(const OperatorBundle& b, int cap = dense_cap()) {
  detail::check_cap(b.grid, cap);
  const int k = b.grid.k, size = b.grid.size();
  DenseMatrix a(size, size);
  for (int i = 0; i < k; ++i) a(i, i) = 1.0;
  for (int i = k; i < size; ++i) {
    for (int j = 0; j <= k; ++j) a(i, i - j) = b.method.alpha(j) / b.grid.h;
  }
  return a;
}

/// B_N = [[0, 0], [B_k, B_n]] with the beta band and no 1/h factor.
inline DenseMatrix dense_B(const OperatorBundle& b, int cap = dense_cap()) {
  detail::check_cap(b.grid, cap);
  const int k = b.grid.k, size = b.grid.size();
  DenseMatrix m(size, size);
  for (int i = k; i < size; ++i) {
    for (int j = 0; j <= k; ++j) m(i, i - j) = b.method.beta(j);
  }
  return m;
}

inline void write_csv(std::ostream& os, const DenseMatrix& m) {
  const auto old = os.precision(17);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

// ---------------------------------------------------------------------------
// E_n (forward difference / h) and its inverse (h times prefix sums)

template <typename T>
std::vector<T> apply_E_inv(std::span<const T> v, double h) {
  std::vector<T> out(v.size());
  T acc(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    out[i] = h * acc;
  }
  return out;
}

inline std::vector<double> apply_E_inv(const std::vector<double>& v, double h) {
  return apply_E_inv<double>(std::span<const double>(v), h);
}

template <typename T>
std::vector<T> apply_E(std::span<const T> v, double h) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - (i ? v[i - 1] : T(0))) / h;
  return out;
}

inline std::vector<double> apply_E(const std::vector<double>& v, double h) {
  return apply_E<double>(std::span<const double>(v), h);
}

/// (I - xi H_n) v, where H_n is the subdiagonal shift.
template <typename T>
std::vector<cplx> apply_shift_factor(cplx xi, std::span<const T> v) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cplx(v[i]) - (i ? xi * cplx(v[i - 1]) : cplx(0.0));
  return out;
}

/// (I - s H_n) v for real s.
inline std::vector<double> apply_real_shift_factor(double s, std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - (i ? s * v[i - 1] : 0.0);
  return out;
}

/// Applies alpha_0 prod_i (I - xi_i H_n) to u, factors right to left, in complex arithmetic.
/// Zero roots are identity factors.
inline std::vector<cplx> apply_root_product(double alpha0, const RootSet& rs, std::span<const double> u) {
  std::vector<cplx> acc(u.begin(), u.end());
  for (auto it = rs.roots.rbegin(); it != rs.roots.rend(); ++it) {
    if (*it == 0.0) continue;
    acc = apply_shift_factor<cplx>(*it, acc);
  }
  for (auto& x : acc) x *= alpha0;
  return acc;
}

/// || h A_n u - alpha_0 prod (I - xi_i H_n) u ||_inf
inline double factorization_residual(const OperatorBundle& b, const RootSet& rs, std::span<const double> u) {
  const auto band = apply_A_interior<double>(b, u);
  const auto product = apply_root_product(b.method.alpha(0), rs, u);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max(worst, std::abs(b.grid.h * band[i] - product[i]));
  }
  return worst;
}

/// Largest imaginary part left after the factor product on a real vector.
inline double factorization_imaginary_leak(const OperatorBundle& b, const RootSet& rs, std::span<const double> u) {
  double worst = 0.0;
  for (const auto& x : apply_root_product(b.method.alpha(0), rs, u)) worst = std::max(worst, std::abs(x.imag()));
  return worst;
}

}  // namespace lmm
