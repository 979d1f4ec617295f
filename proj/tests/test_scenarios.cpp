#include <cmath>

#include "doctest.h"
#include "skbd/errors.hpp"
#include "skbd/scenarios.hpp"

using namespace skbd;

TEST_CASE("emax curve") {
  EmaxParams p;
  p.ec50 = 12.0;
  p.gamma = 2.0;
  CHECK(emax_value(p, 12.0) == doctest::Approx(0.5));
  CHECK(emax_value(p, 0.0) == 0.0);
  CHECK(emax_inverse(p, emax_value(p, 7.0)) == doctest::Approx(7.0));
  CHECK(emax_value(p, 1e300) == doctest::Approx(1.0));
  CHECK_THROWS_AS(emax_inverse(p, 1.0), InvalidArgument);
}

TEST_CASE("two-point fit") {
  auto e = fit_emax_two_point(5, 0.14, 15, 0.45);
  CHECK(e.ec50 == doctest::Approx(17.2).epsilon(0.005));
  CHECK(e.gamma == doctest::Approx(1.47).epsilon(0.005));
  auto v = emax_curve(e, {5, 15, 25, 35, 45});
  std::vector<double> want{0.14, 0.45, 0.63, 0.74, 0.80};
  for (int i = 0; i < 5; ++i) CHECK(std::fabs(v[i] - want[i]) <= 0.01);
  CHECK(std::fabs(emax_inverse(e, 0.3) - 9.6) < 0.1);
}

TEST_CASE("fixed catalog") {
  auto f = fixed_scenarios();
  CHECK(f.size() == 20);
  CHECK(f[15].tox == std::vector<double>{0.01, 0.12, 0.30, 0.41, 0.55});
  CHECK(f[15].true_mtd_index == 2u);
  CHECK(f[15].phi == 0.3);
  CHECK(f[0].tox == std::vector<double>{0.20, 0.26, 0.40, 0.45, 0.46});
  CHECK(f[0].true_mtd_index == 0u);
  CHECK(f[0].phi == 0.2);
  for (const auto& s : f) CHECK_NOTHROW(s.validate());
}

TEST_CASE("insertion catalog") {
  auto s = insertion_scenarios();
  REQUIRE(s.size() == 6);
  std::vector<double> mtd{9.6, 15.1, 19.6, 6.8, 3.2, 86.8};
  for (int i = 0; i < 6; ++i) {
    CAPTURE(i + 1);
    CHECK(std::fabs(*s[i].true_mtd_dose - mtd[i]) < 0.1);
    CHECK(std::fabs(s[i].tox_at(*s[i].true_mtd_dose) - 0.3) < 1e-9);
    CHECK_FALSE(s[i].true_mtd_index.has_value());
    for (std::size_t j = 1; j < 5; ++j) CHECK(s[i].tox_at(s[i].raw_doses[j]) > s[i].tox_at(s[i].raw_doses[j - 1]));
  }
}

TEST_CASE("truth between grid doses") {
  Scenario s;
  s.raw_doses = {10, 20, 40};
  s.tox = {0.1, 0.2, 0.4};
  s.true_mtd_index = 2;
  CHECK(s.tox_at(20) == 0.2);
  CHECK(s.tox_at(15) == doctest::Approx(0.15));
  CHECK(s.tox_at(5) == 0.1);
  CHECK(s.tox_at(80) == 0.4);
  s.scale = DoseScale::log;
  CHECK(s.tox_at(std::sqrt(20.0 * 40.0)) == doctest::Approx(0.3));
}

TEST_CASE("scenario validation") {
  Scenario s;
  s.raw_doses = {1, 2, 3};
  s.tox = {0.1, 0.3};
  s.true_mtd_index = 1;
  CHECK_THROWS_AS(s.validate(), MismatchError);
  s.tox = {0.3, 0.1, 0.4};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.tox = {0.1, 0.3, 0.4};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("mtd index") {
  CHECK(mtd_index({0.1, 0.28, 0.45}, 0.3) == 1u);
  CHECK(mtd_index({0.25, 0.35}, 0.3) == 0u);
}

TEST_CASE("random scenarios satisfy the constraints") {
  RandomConstraints c;
  for (std::uint64_t i = 0; i < 300; ++i) {
    Stream rng(17, i);
    for (int J : {3, 5, 6}) {
      auto s = random_scenario(J, 0.25, c, rng);
      std::size_t j = *s.true_mtd_index;
      CHECK(std::fabs(s.tox[j] - 0.25) <= 0.05 + 1e-12);
      for (int k = 1; k < J; ++k) CHECK(s.tox[k] >= s.tox[k - 1]);
      if (j > 0) CHECK(s.tox[j] - s.tox[j - 1] >= 0.05 - 1e-12);
      if (j + 1 < s.tox.size()) CHECK(s.tox[j + 1] - s.tox[j] <= 0.3 + 1e-12);
      CHECK(mtd_index(s.tox, 0.25) == j);
    }
  }
  Stream a(3, 1), b(3, 1);
  CHECK(random_scenario(5, 0.3, c, a).tox == random_scenario(5, 0.3, c, b).tox);
}

TEST_CASE("stream determinism") {
  Stream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  Stream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.below(5) < 5u);
  }
}
