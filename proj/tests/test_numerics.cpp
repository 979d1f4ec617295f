#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "skbd/errors.hpp"
#include "skbd/numerics.hpp"

using namespace skbd;

TEST_CASE("incomplete beta closed forms") {
  CHECK(reg_inc_beta(0.5, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(reg_inc_beta(0.3, 1, 1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(reg_inc_beta(0.3, 4, 1) == doctest::Approx(0.0081).epsilon(1e-12));
  CHECK(reg_inc_beta(0.0, 2, 3) == 0.0);
  CHECK(reg_inc_beta(1.0, 2, 3) == 1.0);
  // I_x(1, b) = 1 - (1 - x)^b
  CHECK(reg_inc_beta(0.2, 1, 7.5) == doctest::Approx(1 - std::pow(0.8, 7.5)).epsilon(1e-13));
  CHECK_THROWS_AS(reg_inc_beta(-0.1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0, 1), InvalidArgument);
}

TEST_CASE("incomplete beta symmetry") {
  for (double x : {0.05, 0.3, 0.77})
    for (double a : {0.2, 1.5, 9.0})
      for (double b : {0.4, 3.0, 11.0})
        CHECK(reg_inc_beta(x, a, b) + reg_inc_beta(1 - x, b, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("incomplete beta against quadrature") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> ux(0.001, 0.999), uab(0.01, 12.0);
  for (int i = 0; i < 40; ++i) {
    double x = ux(g), a = uab(g), b = uab(g);
    CAPTURE(x);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(std::fabs(reg_inc_beta(x, a, b) - oracle::inc_beta(x, a, b)) < 1e-8);
  }
}

TEST_CASE("interval probabilities") {
  CHECK(beta_interval_prob({1, 1}, 0.25, 0.35) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(beta_interval_prob({4, 1}, 0.3, 1.0) == doctest::Approx(0.9919).epsilon(1e-12));
  double q = oracle::inc_beta(0.35, 3, 8) - oracle::inc_beta(0.25, 3, 8);
  CHECK(std::fabs(beta_interval_prob({3, 8}, 0.25, 0.35) - q) < 1e-8);
  CHECK(beta_interval_prob({3, 8}, 0.4, 0.4) == 0.0);
  CHECK_THROWS_AS(beta_interval_prob({3, 8}, 0.5, 0.4), InvalidArgument);
  CHECK_THROWS_AS(beta_interval_prob({3, 8}, -0.1, 0.4), InvalidArgument);
}

TEST_CASE("beta density integrates to one") {
  BetaParams p{2.5, 4.0};
  double s = oracle::simpson([&](double x) { return beta_density(p, x); }, 0.0, 1.0, 1e-12);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pava examples") {
  CHECK(pava({0.1, 0.2, 0.3}, {5, 1, 2}) == std::vector<double>{0.1, 0.2, 0.3});
  auto a = pava({0.3, 0.1});
  CHECK(a[0] == doctest::Approx(0.2));
  CHECK(a[1] == doctest::Approx(0.2));
  auto b = pava({0.1, 0.3, 0.2, 0.4});
  std::vector<double> want{0.1, 0.25, 0.25, 0.4};
  for (int i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(want[i]));
  auto c = pava({0.1, 0.3, 0.2}, Monotone::nonincreasing);
  CHECK(c[0] == doctest::Approx(0.2));
  CHECK(c[1] == doctest::Approx(0.2));
  CHECK(c[2] == doctest::Approx(0.2));
  CHECK(pava(std::vector<double>{}).empty());
  CHECK_THROWS_AS(pava({0.1, 0.2}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(pava({0.1, 0.2}, {1.0, 0.0}), InvalidArgument);
}

TEST_CASE("pava matches brute force on random weighted input") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> uv(0.0, 1.0), uw(0.1, 5.0);
  for (int rep = 0; rep < 300; ++rep) {
    std::size_t n = 1 + rep % 7;
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = uv(g), w[i] = uw(g);
    for (auto dir : {Monotone::nondecreasing, Monotone::nonincreasing}) {
      auto got = pava(v, w, dir);
      auto want = oracle::isotonic_brute(v, w, dir == Monotone::nondecreasing);
      for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("pava properties") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> uv(0.0, 1.0), uw(0.1, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + rep % 9;
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = uv(g), w[i] = uw(g);
    auto f = pava(v, w);
    double sv = 0, sf = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sv += w[i] * v[i];
      sf += w[i] * f[i];
      if (i) CHECK(f[i] >= f[i - 1] - 1e-14);
    }
    // Weighted mean preserved; idempotent.
    CHECK(sf == doctest::Approx(sv).epsilon(1e-12));
    auto ff = pava(f, w);
    for (std::size_t i = 0; i < n; ++i) CHECK(ff[i] == doctest::Approx(f[i]).epsilon(1e-14));
  }
}
