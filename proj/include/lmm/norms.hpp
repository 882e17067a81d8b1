#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "lmm/error.hpp"
#include "lmm/operators.hpp"

namespace lmm {

// ---------------------------------------------------------------------------
// Block norms

template <typename T>
double sup_norm(std::span<const T> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, static_cast<double>(std::abs(x)));
  return m;
}

/// Interior Spijker seminorm: h * max_l |v_1 + ... + v_l|.
template <typename T>
double spijker_seminorm(std::span<const T> v, double h) {
  T acc(0);
  double m = 0.0;
  for (const auto& x : v) {
    acc += x;
    m = std::max(m, static_cast<double>(std::abs(acc)));
  }
  return h * m;
}

inline double sup_norm(const std::vector<double>& v) { return sup_norm<double>(std::span<const double>(v)); }
inline double spijker_seminorm(const std::vector<double>& v, double h) {
  return spijker_seminorm<double>(std::span<const double>(v), h);
}

/// max over the start block plus max over the computed block.
inline double norm_kinf(const TrajectoryVector& u) {
  if (u.n() <= 0) throw Error(ErrorCode::EmptyBlock, "k-infinity norm needs a nonempty interior block");
  return sup_norm(u.head()) + sup_norm(u.tail());
}

/// max over the start block plus h times the largest absolute partial sum of the computed block.
inline double norm_kspijker(const TrajectoryVector& u, double h) {
  if (u.n() <= 0) throw Error(ErrorCode::EmptyBlock, "k-Spijker norm needs a nonempty interior block");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  return sup_norm(u.head()) + spijker_seminorm(u.tail(), h);
}

// ---------------------------------------------------------------------------
// Norm pairs

enum class NormKind { KInf, KSpijker };

inline const char* to_string(NormKind k) { return k == NormKind::KInf ? "k-inf" : "k-spijker"; }

/// (domain, range) norms of the stability estimate. Only (k-inf, k-inf) and
/// (k-inf, k-Spijker) exist.
class NormPair {
 public:
  static NormPair inf_inf() { return NormPair(NormKind::KInf); }
  static NormPair inf_spijker() { return NormPair(NormKind::KSpijker); }

  NormKind domain_norm() const noexcept { return NormKind::KInf; }
  NormKind range_norm() const noexcept { return range_; }
  std::string label() const { return range_ == NormKind::KInf ? "inf-inf" : "inf-spijker"; }

  friend bool operator==(const NormPair&, const NormPair&) = default;

 private:
  explicit NormPair(NormKind range) : range_(range) {}
  NormKind range_;
};

inline double range_norm(const NormPair& pair, const TrajectoryVector& x, double h) {
  return pair.range_norm() == NormKind::KInf ? norm_kinf(x) : norm_kspijker(x, h);
}

// ---------------------------------------------------------------------------
// Exact stability constant of the linear part

struct StabilityConstantDetail {
  double value = 0.0;
  TrajectoryVector extremal_rhs;  // x with ||A_N^{-1} x||_{k-inf} = value * ||x||_range
};

struct StabilityConstantReport {
  std::string method;
  NormPair pair = NormPair::inf_inf();
  std::vector<std::pair<int, double>> rows;  // (n, S_n), n ascending
};

namespace detail {

// Columns of A^{-1} for a lower-triangular A by forward substitution, skipping
// the structurally zero prefix of each row.
inline DenseMatrix lower_triangular_inverse(const DenseMatrix& a) {
  const int size = a.rows;
  std::vector<int> first(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    int j = 0;
    while (j < i && a(i, j) == 0.0) ++j;
    first[i] = j;
    if (a(i, i) == 0.0) throw Error(ErrorCode::SingularA, "zero diagonal entry in A_N");
  }
  DenseMatrix inv(size, size);
  std::vector<double> x(static_cast<std::size_t>(size));
  for (int c = 0; c < size; ++c) {
    std::fill(x.begin(), x.end(), 0.0);
    for (int i = c; i < size; ++i) {
      double acc = (i == c) ? 1.0 : 0.0;
      for (int j = std::max(first[i], c); j < i; ++j) acc -= a(i, j) * x[j];
      x[i] = acc / a(i, i);
    }
    for (int i = c; i < size; ++i) inv(i, c) = x[i];
  }
  return inv;
}

struct BlockOptimum {
  double value = -1.0;
  int top_row = 0;
  int bottom_row = 0;
  double sign = 1.0;
};

// sup over ||y||_inf <= 1 of  max_{i<k} |(M y)_i| + max_{i>=k} |(M y)_i|,
// with y supported on columns [c0, c1). Equals max over row pairs (p, q)
// and sign s of ||p + s q||_1.
inline BlockOptimum block_optimum(const DenseMatrix& m, int k, int c0, int c1) {
  BlockOptimum best;
  for (int p = 0; p < k; ++p) {
    for (int q = k; q < m.rows; ++q) {
      double plus = 0.0, minus = 0.0;
      for (int c = c0; c < c1; ++c) {
        plus += std::abs(m(p, c) + m(q, c));
        minus += std::abs(m(p, c) - m(q, c));
      }
      if (plus > best.value) best = {plus, p, q, 1.0};
      if (minus > best.value) best = {minus, p, q, -1.0};
    }
  }
  return best;
}

}  // namespace detail

/// Induced norm of A_N^{-1} from the range norm of the pair into the k-inf norm.
///
/// Both norms are ||W x||_{k-inf} with W = diag(I, I) or diag(I, E_n^{-1}), so the
/// constant is the (k-inf -> k-inf) norm of M = A_N^{-1} diag(I, W_n^{-1}). The
/// unit ball of k-inf is the hull of the two block balls, hence the maximum of
/// two block terms, each a maximum of l1 norms over (start row, interior row) pairs.
inline StabilityConstantDetail stability_constant_detail(const OperatorBundle& b, const NormPair& pair,
                                                         int cap = dense_cap()) {
  const int k = b.grid.k, size = b.grid.size();
  const double h = b.grid.h;
  DenseMatrix m = detail::lower_triangular_inverse(dense_A(b, cap));

  if (pair.range_norm() == NormKind::KSpijker) {
    // Right-multiply the interior columns by E_n = (I - H_n) / h.
    for (int c = k; c < size; ++c) {
      for (int r = 0; r < size; ++r) {
        const double next = (c + 1 < size) ? m(r, c + 1) : 0.0;
        m(r, c) = (m(r, c) - next) / h;
      }
    }
  }

  const auto start_block = detail::block_optimum(m, k, 0, k);
  const auto interior_block = detail::block_optimum(m, k, k, size);
  const bool use_start = start_block.value >= interior_block.value;
  const auto& best = use_start ? start_block : interior_block;
  const int c0 = use_start ? 0 : k, c1 = use_start ? k : size;

  std::vector<double> y(static_cast<std::size_t>(size), 0.0);
  for (int c = c0; c < c1; ++c) {
    const double entry = m(best.top_row, c) + best.sign * m(best.bottom_row, c);
    y[c] = entry < 0.0 ? -1.0 : 1.0;
  }
  TrajectoryVector x{y, k};
  if (pair.range_norm() == NormKind::KSpijker) {
    const auto interior = apply_E<double>(std::span<const double>(y).subspan(static_cast<std::size_t>(k)), h);
    std::copy(interior.begin(), interior.end(), x.values.begin() + k);
  }
  return {best.value, std::move(x)};
}

inline double stability_constant(const OperatorBundle& b, const NormPair& pair, int cap = dense_cap()) {
  return stability_constant_detail(b, pair, cap).value;
}

inline StabilityConstantReport stability_constant_report(const MultistepMethod& m, const NormPair& pair,
                                                         const std::vector<int>& n_list, double T = 1.0,
                                                         int cap = dense_cap()) {
  StabilityConstantReport report{m.name(), pair, {}};
  auto sorted = n_list;
  std::sort(sorted.begin(), sorted.end());
  for (int n : sorted) report.rows.emplace_back(n, stability_constant(make_bundle(m, n, T), pair, cap));
  return report;
}

}  // namespace lmm
