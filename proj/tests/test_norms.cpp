#include <catch2/catch_amalgamated.hpp>

#include "lmm/norms.hpp"
#include "lmm/witness.hpp"
#include "test_support.hpp"

using namespace lmm;
using lmm::testing::random_vector;
using lmm::testing::solve_lmm_recurrence;

namespace {

// ||A_N^{-1} x||_{k-inf} / ||x||_range with the solve done by the scalar recurrence.
double probe_ratio(const OperatorBundle& b, const NormPair& pair, const std::vector<double>& x) {
  const std::vector<double> alpha(b.method.alpha().begin(), b.method.alpha().end());
  const auto u = solve_lmm_recurrence(alpha, b.grid.h, b.grid.k, x);
  return norm_kinf(make_trajectory(u, b.grid.k)) / range_norm(pair, make_trajectory(x, b.grid.k), b.grid.h);
}

// Maps y (in weighted coordinates) to x: interior block multiplied by E_n for the Spijker pair.
std::vector<double> from_weighted(const OperatorBundle& b, const NormPair& pair, std::vector<double> y) {
  if (pair.range_norm() == NormKind::KSpijker) {
    const int k = b.grid.k;
    const std::vector<double> tail(y.begin() + k, y.end());
    const auto e = apply_E(tail, b.grid.h);
    std::copy(e.begin(), e.end(), y.begin() + k);
  }
  return y;
}

// Supremum by enumerating the sign vertices of both block unit balls.
double brute_force_constant(const OperatorBundle& b, const NormPair& pair) {
  const int k = b.grid.k, size = b.grid.size();
  double best = 0.0;
  for (int block = 0; block < 2; ++block) {
    const int c0 = block == 0 ? 0 : k, c1 = block == 0 ? k : size;
    const int width = c1 - c0;
    for (long mask = 0; mask < (1L << width); ++mask) {
      std::vector<double> y(static_cast<std::size_t>(size), 0.0);
      for (int c = 0; c < width; ++c) y[c0 + c] = (mask >> c) & 1 ? 1.0 : -1.0;
      best = std::max(best, probe_ratio(b, pair, from_weighted(b, pair, y)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("norm_kinf", "[norms]") {
  CHECK(norm_kinf(spijker_witness(4)) == 4.0);
  CHECK(norm_kinf(make_trajectory({0, 0, 0, 0}, 2)) == 0.0);
  CHECK(norm_kinf(make_trajectory({2, -3, 1}, 1)) == 5.0);
  try {
    norm_kinf(make_trajectory({1, 2}, 2));
    FAIL("expected EmptyBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBlock);
  }
}

TEST_CASE("norm_kspijker", "[norms]") {
  const int n = 11;
  const double h = 1.0 / (n + 1);
  std::vector<double> x(static_cast<std::size_t>(n) + 2, 0.0);
  for (int m = 0; m < n; ++m) x[2 + m] = (m == 0 ? 0.5 : (m % 2 == 1 ? -1.0 : 1.0)) / h;
  CHECK(norm_kspijker(make_trajectory(x, 2), h) == Catch::Approx(0.5).margin(1e-12));
  CHECK(norm_kspijker(make_trajectory({0, 0, 0}, 1), 0.1) == 0.0);
  CHECK(norm_kspijker(make_trajectory({-2, 1, 1, -3}, 1), 0.5) == Catch::Approx(2.0 + 0.5 * 2.0));
  CHECK_THROWS_AS(norm_kspijker(make_trajectory({1.0}, 1), 0.1), Error);
  CHECK_THROWS_AS(norm_kspijker(make_trajectory({1.0, 1.0}, 1), 0.0), Error);
}

TEST_CASE("Spijker seminorm equals the sup norm after E_n^{-1}", "[norms][property]") {
  auto seed = GENERATE(0u, 1u, 2u);
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = random_vector(rng, 80);
    const double h = 1.0 / 81.0;
    CHECK(std::abs(spijker_seminorm(v, h) - sup_norm(apply_E_inv(v, h))) <= 1e-12);
    // Prefix-sum bound.
    CHECK(spijker_seminorm(v, h) <= 80 * h * sup_norm(v) + 1e-15);
  }
}

TEST_CASE("norm axioms hold for both block norms", "[norms][property]") {
  auto seed = GENERATE(0u, 1u, 2u);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scalar(-5.0, 5.0);
  const double h = 0.02;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 3;
    const auto u = make_trajectory(random_vector(rng, 40), k);
    const auto v = make_trajectory(random_vector(rng, 40), k);
    const double a = scalar(rng);
    auto sum = u;
    auto scaled = u;
    for (std::size_t i = 0; i < 40; ++i) {
      sum.values[i] += v.values[i];
      scaled.values[i] *= a;
    }
    for (auto norm : {std::function<double(const TrajectoryVector&)>([](const TrajectoryVector& x) { return norm_kinf(x); }),
                      std::function<double(const TrajectoryVector&)>([h](const TrajectoryVector& x) { return norm_kspijker(x, h); })}) {
      CHECK(norm(u) > 0.0);
      CHECK(std::abs(norm(scaled) - std::abs(a) * norm(u)) <= 1e-12 * (1.0 + std::abs(a) * norm(u)));
      CHECK(norm(sum) <= norm(u) + norm(v) + 1e-12);
    }
  }
}

TEST_CASE("NormPair exposes exactly the two studied pairs", "[norms]") {
  CHECK(NormPair::inf_inf().domain_norm() == NormKind::KInf);
  CHECK(NormPair::inf_inf().range_norm() == NormKind::KInf);
  CHECK(NormPair::inf_spijker().range_norm() == NormKind::KSpijker);
  CHECK(NormPair::inf_spijker().label() == "inf-spijker");
  CHECK_FALSE(NormPair::inf_inf() == NormPair::inf_spijker());
}

TEST_CASE("stability constant examples", "[norms][oracle]") {
  const auto euler = *find_method("euler");
  // A_N = [[1, 0], [-1/h, 1/h]] with h = 1; inverse [[1, 0], [1, h]], so S = 1 + h.
  const auto b1 = make_bundle(euler, 1);
  CHECK(b1.grid.h == 1.0);
  CHECK(stability_constant(b1, NormPair::inf_inf()) == Catch::Approx(1.0 + b1.grid.h).epsilon(1e-14));

  const double s128 = stability_constant(make_bundle(euler, 128), NormPair::inf_inf());
  const double s256 = stability_constant(make_bundle(euler, 256), NormPair::inf_inf());
  CHECK(s256 / s128 >= 0.9);
  CHECK(s256 / s128 <= 1.1);

  const auto mid = *find_method("midpoint");
  for (int n : {8, 32, 100}) CHECK(stability_constant(make_bundle(mid, n), NormPair::inf_spijker()) >= 2.0 * n - 1e-9);

  CHECK_THROWS_AS(stability_constant(make_bundle(euler, 300), NormPair::inf_inf(), 100), Error);

  const auto report = stability_constant_report(mid, NormPair::inf_spijker(), {32, 8, 16});
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].first == 8);
  CHECK(report.rows[2].first == 32);
  for (auto [n, s] : report.rows) CHECK(s > 0.0);
}

TEST_CASE("stability constant matches vertex enumeration on small grids", "[norms][oracle]") {
  for (const auto& m : catalog()) {
    for (int n : {1, 2, 5, 9}) {
      const auto b = make_bundle(m, n);
      for (const auto& pair : {NormPair::inf_inf(), NormPair::inf_spijker()}) {
        INFO(m.name() << " n=" << n << " " << pair.label());
        const double exact = brute_force_constant(b, pair);
        CHECK(stability_constant(b, pair) == Catch::Approx(exact).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("stability constant dominates random probes and is attained", "[norms][oracle][property]") {
  auto seed = GENERATE(0u, 1u, 2u);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  for (const auto& m : catalog()) {
    for (int n : {3, 16, 64}) {
      const auto b = make_bundle(m, n);
      for (const auto& pair : {NormPair::inf_inf(), NormPair::inf_spijker()}) {
        INFO(m.name() << " n=" << n << " " << pair.label());
        const auto detail = stability_constant_detail(b, pair);
        const double s = detail.value;
        CHECK(s > 0.0);
        // Attainment by the reported sign pattern.
        CHECK(std::abs(probe_ratio(b, pair, detail.extremal_rhs.values) - s) <= 1e-9 * std::max(1.0, s));

        double best_probe = 0.0;
        for (int probe = 0; probe < 2000; ++probe) {
          std::vector<double> y;
          if (probe % 2 == 0) {
            y = random_vector(rng, static_cast<std::size_t>(b.grid.size()));
          } else {
            y.assign(static_cast<std::size_t>(b.grid.size()), 0.0);
            for (auto& v : y) v = coin(rng) ? 1.0 : -1.0;
          }
          best_probe = std::max(best_probe, probe_ratio(b, pair, from_weighted(b, pair, y)));
        }
        CHECK(best_probe <= s * (1.0 + 1e-12));
      }
    }
  }
}
