#include <cmath>

#include "doctest.h"
#include "skbd/errors.hpp"
#include "skbd/sim.hpp"

using namespace skbd;

namespace {

Scenario flat(std::vector<double> tox, std::size_t mtd) {
  Scenario s;
  s.name = "test";
  s.raw_doses = {1, 2, 3, 4, 5};
  s.tox = std::move(tox);
  s.phi = 0.3;
  s.true_mtd_index = mtd;
  return s;
}

SimDesign keyboard() {
  SimDesign d;
  d.name = "Keyboard";
  d.design = keyboard_config(0.3);
  return d;
}

TrialRecord record(std::vector<int> alloc, std::optional<std::size_t> sel) {
  TrialRecord r;
  r.raw_doses = {1, 2, 3, 4, 5};
  r.inserted_flags.assign(5, false);
  r.allocations = alloc;
  r.dlts.assign(5, 0);
  r.selected_mtd = sel;
  for (int a : alloc) r.realized_n += a;
  return r;
}

bool same_record(const TrialRecord& a, const TrialRecord& b) {
  return a.selected_mtd == b.selected_mtd && a.allocations == b.allocations && a.dlts == b.dlts &&
         a.raw_doses == b.raw_doses && a.path.size() == b.path.size();
}

}  // namespace

TEST_CASE("no toxicity climbs to the top") {
  Stream rng(1, 0);
  auto r = run_trial(keyboard(), flat({0, 0, 0, 0, 0}, 4), rng);
  CHECK(r.selected_mtd == 4u);
  REQUIRE(r.path.size() == 10);
  for (int c = 0; c < 4; ++c) CHECK(r.path[c].dose_index == static_cast<std::size_t>(c));
  CHECK(r.allocations == std::vector<int>{3, 3, 3, 3, 18});
  CHECK(r.realized_n == 30);
}

TEST_CASE("certain toxicity stops at the first cohort") {
  Stream rng(1, 0);
  auto r = run_trial(keyboard(), flat({1, 1, 1, 1, 1}, 0), rng);
  CHECK(r.terminated_early);
  CHECK_FALSE(r.selected_mtd.has_value());
  CHECK(r.realized_n == 3);
  CHECK(r.path.back().action == "terminate");
}

TEST_CASE("simulation is deterministic across thread counts") {
  SimDesign d;
  d.design = skbd_config(0.3);
  auto s = fixed_scenarios()[15];
  auto a = run_records(d, s, 200, 99, 1);
  auto b = run_records(d, s, 200, 99, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_record(a[i], b[i]));
  auto o1 = run_trials(d, s, 200, 99, 3);
  auto o2 = run_trials(d, s, 200, 99, 2);
  CHECK(*o1.pcs == *o2.pcs);
  CHECK(o1.rod == o2.rod);
  CHECK(o1.per_dose_allocation == o2.per_dose_allocation);
}

TEST_CASE("single replicate summary") {
  SimDesign d;
  d.design = skbd_config(0.3);
  auto s = fixed_scenarios()[15];
  auto recs = run_records(d, s, 1, 5, 1);
  auto o = oc_metrics(recs, s);
  bool hit = recs[0].selected_mtd == 2u;
  CHECK(*o.pcs == (hit ? 100.0 : 0.0));
  CHECK(*o.pca == doctest::Approx(100.0 * recs[0].allocations[2] / recs[0].realized_n));
  CHECK(o.mean_n == recs[0].realized_n);
}

TEST_CASE("metrics on hand-built records") {
  auto s = flat({0.05, 0.1, 0.3, 0.5, 0.6}, 2);
  std::vector<TrialRecord> all(3, record({0, 0, 30, 0, 0}, 2));
  auto o = oc_metrics(all, s);
  CHECK(*o.pcs == 100.0);
  CHECK(*o.pca == 100.0);
  CHECK(o.above_mtd == 0.0);
  CHECK(o.rod == 0.0);

  std::vector<TrialRecord> four{record({3, 3, 6, 18, 0}, 2), record({3, 3, 12, 6, 6}, 3),
                                record({3, 27, 0, 0, 0}, 1), record({3, 0, 0, 0, 0}, std::nullopt)};
  four[3].terminated_early = true;
  auto m = oc_metrics(four, s);
  CHECK(*m.pcs == doctest::Approx(25.0));
  CHECK(*m.pca == doctest::Approx(100.0 * (6.0 / 30 + 12.0 / 30 + 0 + 0) / 4));
  CHECK(m.above_mtd == doctest::Approx(100.0 * (18.0 / 30 + 12.0 / 30 + 0 + 0) / 4));
  CHECK(m.no_selection == doctest::Approx(25.0));
  CHECK(m.mean_n == doctest::Approx((30 + 30 + 30 + 3) / 4.0));
  CHECK(m.per_dose_selection[1] == doctest::Approx(25.0));
  // 18 of 30 above sits exactly on the threshold.
  CHECK(m.rod == 0.0);
  MetricOptions inclusive;
  inclusive.rod_inclusive = true;
  CHECK(oc_metrics(four, s, inclusive).rod == doctest::Approx(25.0));
}

TEST_CASE("kronecker borrowing design equals the keyboard design") {
  SimDesign kb = keyboard();
  SimDesign deg;
  deg.design = skbd_config(0.3);
  deg.design.kernel.kind = KernelKind::kronecker;
  auto s = fixed_scenarios()[13];
  auto a = run_records(kb, s, 100, 3, 2);
  auto b = run_records(deg, s, 100, 3, 2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_record(a[i], b[i]));
}

TEST_CASE("insertion trials") {
  SimDesign d;
  d.design = skbd_config(0.3);
  d.insertion = InsertionConfig{};
  auto s = insertion_scenarios()[0];
  auto recs = run_records(d, s, 100, 8, 2);
  int with = 0;
  for (const auto& r : recs) {
    CHECK(r.insertions.size() <= 3);
    CHECK(r.raw_doses.size() == 5 + r.insertions.size());
    with += !r.insertions.empty();
    int flagged = 0;
    for (bool f : r.inserted_flags) flagged += f;
    CHECK(flagged == static_cast<int>(r.insertions.size()));
    CHECK(r.realized_n <= 30);
  }
  CHECK(with > 50);
  auto o = oc_metrics(recs, s, {}, true);
  CHECK(o.modification_rate.has_value());
  CHECK(*o.modification_rate == doctest::Approx(with));
  CHECK_FALSE(o.pcs.has_value());

  auto up = insertion_scenarios()[5];
  bool saw = false;
  for (std::uint64_t r = 0; r < 50 && !saw; ++r) {
    Stream g(4, r);
    auto t = run_trial(d, up, g);
    for (const auto& e : t.insertions)
      if (e.kind == TriggerKind::upper_boundary) {
        CHECK(e.raw_dose == doctest::Approx(75.0));
        saw = true;
        break;
      }
  }
  CHECK(saw);
}

TEST_CASE("TITE trials") {
  SimDesign d;
  d.design = skbd_config(0.3);
  d.tite = TiteConfig{};
  auto s = fixed_scenarios()[15];
  auto a = run_records(d, s, 100, 2, 1);
  auto b = run_records(d, s, 100, 2, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_record(a[i], b[i]));
  Stream rng(1, 0);
  auto r = run_trial(d, flat({0, 0, 0, 0, 0}, 4), rng);
  CHECK(r.selected_mtd == 4u);
}

TEST_CASE("mismatched scenario") {
  SimDesign d;
  d.doses = std::vector<double>{10, 20, 30};
  CHECK_THROWS_AS(check_compatible(d, fixed_scenarios()[0]), MismatchError);
  SimDesign bad;
  bad.insertion = InsertionConfig{};
  bad.tite = TiteConfig{};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
