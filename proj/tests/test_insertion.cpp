#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "skbd/errors.hpp"
#include "skbd/insertion.hpp"

using namespace skbd;

namespace {

DoseGrid grid_mg() { return standardize_doses({5, 15, 25, 35, 45}, DoseScale::linear); }

TrialState state(const DoseGrid& g, TrialData d, std::size_t cur, int insertions = 0) {
  TrialState s;
  s.grid = g;
  s.data = std::move(d);
  s.current = cur;
  s.insertions = insertions;
  return s;
}

}  // namespace

TEST_CASE("insertion posterior") {
  auto g = grid_mg();
  InsertionConfig cfg;
  auto p = insertion_posterior(0.0, g, TrialData({3, 0, 0, 0, 0}, {3, 0, 0, 0, 0}), cfg);
  CHECK(p.alpha == doctest::Approx(3.5));
  CHECK(p.beta == doctest::Approx(0.5));

  TrialData none({3, 6, 3, 0, 0}, {0, 0, 0, 0, 0});
  auto q = insertion_posterior(0.4, g, none, cfg);
  CHECK(q.alpha == doctest::Approx(0.5));
  CHECK(q.beta > 0.5 + 3.0);
  CHECK(q.beta < 0.5 + 6.0);

  TrialData d({3, 6, 9, 3, 0}, {0, 1, 2, 2, 0});
  double th = -std::log(cfg.symmetric_kernel_value) / (0.25 * 0.25);
  for (double x : {0.5, 0.37, 0.9}) {
    auto got = insertion_posterior(x, g, d, cfg);
    auto c = oracle::borrowed(g.std_doses, d.n, d.y, x, th, th);
    CHECK(std::fabs(got.alpha - (0.5 + c.y)) < 1e-10);
    CHECK(std::fabs(got.beta - (0.5 + c.n - c.y)) < 1e-10);
  }
}

TEST_CASE("insertion probabilities are isotonic") {
  auto g = grid_mg();
  InsertionConfig cfg;
  TrialData d({3, 6, 6, 3, 0}, {2, 1, 3, 1, 0});
  auto pr = insertion_probabilities(g, d, cfg, 0.3, 0.05, 0.05);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(pr.p_over[i] >= pr.p_over[i - 1] - 1e-15);
    CHECK(pr.p_under[i] <= pr.p_under[i - 1] + 1e-15);
  }
  auto want = oracle::isotonic_brute(pr.p_over_raw, std::vector<double>(5, 1.0));
  for (std::size_t i = 0; i < 5; ++i) CHECK(pr.p_over[i] == doctest::Approx(want[i]));
}

TEST_CASE("trigger checks") {
  auto g = grid_mg();
  InsertionConfig cfg;

  auto low = state(g, TrialData({3, 0, 0, 0, 0}, {3, 0, 0, 0, 0}), 0);
  CHECK(1.0 - oracle::inc_beta(0.35, 3.5, 0.5) > 0.6);
  CHECK(check_insertion(low, cfg, 0.3, 0.05, 0.05).kind == TriggerKind::lower_boundary);

  auto top = state(g, TrialData({3, 3, 3, 3, 3}, {0, 0, 0, 0, 0}), 4);
  CHECK(check_insertion(top, cfg, 0.3, 0.05, 0.05).kind == TriggerKind::upper_boundary);
  // Not at the top dose: no upper insertion.
  auto mid = state(g, TrialData({3, 3, 3, 3, 3}, {0, 0, 0, 0, 0}), 3);
  CHECK(check_insertion(mid, cfg, 0.3, 0.05, 0.05).kind == TriggerKind::none);

  auto fresh = state(g, TrialData({3, 0, 0, 0, 0}, {0, 0, 0, 0, 0}), 0);
  CHECK(1.0 - oracle::inc_beta(0.35, 0.5, 3.5) < 0.6);
  auto t = check_insertion(fresh, cfg, 0.3, 0.05, 0.05);
  CHECK(t.kind == TriggerKind::none);

  auto gap = state(g, TrialData({3, 6, 6, 0, 0}, {0, 0, 4, 0, 0}), 2);
  auto ti = check_insertion(gap, cfg, 0.3, 0.05, 0.05);
  CHECK(ti.kind == TriggerKind::interior);
  CHECK(ti.interval_index == 1u);

  auto spent = state(g, TrialData({3, 0, 0, 0, 0}, {3, 0, 0, 0, 0}), 0, 3);
  auto tb = check_insertion(spent, cfg, 0.3, 0.05, 0.05);
  CHECK(tb.kind == TriggerKind::none);
  CHECK(tb.reason == "budget");
}

TEST_CASE("interior dose choice") {
  auto g = grid_mg();
  InsertionConfig cfg;
  TrialData d({0, 6, 6, 0, 0}, {0, 0, 4, 0, 0});
  double x = choose_interior_dose(1, g, d, cfg, 0.3, 0.05, 0.05);
  CHECK(x > g.std_doses[1]);
  CHECK(x < g.std_doses[2]);

  // Ten times finer search.
  double lo = g.std_doses[1], hi = g.std_doses[2];
  int fine = 10 * (cfg.candidate_points + 1) - 1;
  double best = -1, arg = lo;
  for (int i = 1; i <= fine; ++i) {
    double z = lo + (hi - lo) * i / (fine + 1.0);
    auto post = insertion_posterior(z, g, d, cfg);
    double q = reg_inc_beta(0.35, post) - reg_inc_beta(0.25, post);
    if (q > best) best = q, arg = z;
  }
  CHECK(std::fabs(x - arg) <= (hi - lo) / (cfg.candidate_points + 1.0));

  TrialData flat({0, 6, 6, 0, 0}, {0, 2, 2, 0, 0});
  CHECK(choose_interior_dose(1, g, flat, cfg, 0.3, 0.05, 0.05) == doctest::Approx(0.375));

  InsertionConfig one = cfg;
  one.candidate_points = 1;
  CHECK(choose_interior_dose(1, g, d, one, 0.3, 0.05, 0.05) == doctest::Approx(0.375));

  auto curve = q_curve(1, g, d, cfg, 0.3, 0.05, 0.05);
  CHECK(curve.size() == 199);
  CHECK_THROWS_AS(q_curve(4, g, d, cfg, 0.3, 0.05, 0.05), InvalidArgument);
}

TEST_CASE("boundary doses") {
  auto g = standardize_doses({10, 20, 30, 40, 50}, DoseScale::linear);
  CHECK(boundary_dose(TriggerKind::lower_boundary, g) == doctest::Approx(5.0));
  CHECK(boundary_dose(TriggerKind::upper_boundary, g) == doctest::Approx(75.0));
  auto g2 = augment_grid(g, 75.0).grid;
  CHECK_THROWS_AS(boundary_dose(TriggerKind::upper_boundary, g2), InvalidArgument);
  auto g3 = augment_grid(g, 5.0).grid;
  CHECK(boundary_dose(TriggerKind::lower_boundary, g3) == doctest::Approx(2.5));
  CHECK(g3.to_std(75.0) == doctest::Approx(g.to_std(75.0)));
}

TEST_CASE("grid augmentation") {
  auto g = grid_mg();
  auto a = augment_grid(g, 10.7);
  CHECK(a.grid.size() == 6);
  CHECK(a.index == 1);
  CHECK(a.grid.inserted[1]);
  CHECK(a.grid.std_doses[1] == doctest::Approx((10.7 - 5) / 40));
  CHECK(a.grid.sigma == g.sigma);
  CHECK(augment_grid(g, 10.7, true).grid.sigma == doctest::Approx(0.25 - (10.7 - 5) / 40));

  auto b = augment_grid(standardize_doses({10, 20, 30}, DoseScale::linear), 5.0);
  CHECK(b.index == 0);
  CHECK(b.grid.std_doses[0] == doctest::Approx(-0.25));
  CHECK_THROWS_AS(augment_grid(g, 15.0), InvalidArgument);
}

TEST_CASE("applying an insertion shifts the state") {
  auto g = grid_mg();
  auto s = state(g, TrialData({3, 6, 3, 0, 0}, {0, 1, 2, 0, 0}), 2);
  s.eliminated_from = 3;
  auto idx = apply_insertion(s, 20.0, false);
  CHECK(idx == 2);
  CHECK(s.current == 3);
  CHECK(s.eliminated_from == 4u);
  CHECK(s.insertions == 1);
  CHECK(s.data.n == std::vector<int>{3, 6, 0, 3, 0, 0});
}

TEST_CASE("proposed dose") {
  auto g = standardize_doses({10, 20, 30, 40, 50}, DoseScale::linear);
  InsertionConfig cfg;
  auto low = state(g, TrialData({3, 0, 0, 0, 0}, {3, 0, 0, 0, 0}), 0);
  auto t = check_insertion(low, cfg, 0.3, 0.05, 0.05);
  CHECK(proposed_dose(t, low, cfg, 0.3, 0.05, 0.05) == doctest::Approx(5.0));
  CHECK_THROWS_AS(proposed_dose(InsertionTrigger{}, low, cfg, 0.3, 0.05, 0.05), InvalidArgument);
}
