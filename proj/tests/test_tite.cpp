#include <random>

#include "doctest.h"
#include "skbd/design.hpp"
#include "skbd/errors.hpp"
#include "skbd/tite.hpp"

using namespace skbd;

namespace {

PatientRecord patient(std::size_t dose, bool dlt, double dlt_time, double followup) {
  PatientRecord p;
  p.dose_index = dose;
  p.dlt = dlt;
  if (dlt) p.dlt_time = dlt_time;
  p.followup = followup;
  return p;
}

}  // namespace

TEST_CASE("follow-up weights") {
  CHECK(follow_up_weight(patient(0, true, 1.0, 1.5), 3.0) == 1.0);
  CHECK(follow_up_weight(patient(0, false, 0, 1.5), 3.0) == doctest::Approx(0.5));
  CHECK(follow_up_weight(patient(0, false, 0, 0.0), 3.0) == 0.0);
  CHECK(follow_up_weight(patient(0, false, 0, 3.0), 3.0) == 1.0);
  // A DLT that has not happened yet is still pending.
  CHECK(follow_up_weight(patient(0, true, 2.0, 1.5), 3.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(follow_up_weight(patient(0, false, 0, 3.5), 3.0), InvalidArgument);
  CHECK_THROWS_AS(follow_up_weight(patient(0, false, 0, -1), 3.0), InvalidArgument);
}

TEST_CASE("effective counts") {
  std::vector<PatientRecord> a{patient(0, true, 1.0, 2.0), patient(0, false, 0, 3.0),
                               patient(0, false, 0, 1.5)};
  auto e = effective_counts(a, 3.0);
  CHECK(e.y_eff == doctest::Approx(1.0));
  CHECK(e.n_eff == doctest::Approx(2.5));

  std::vector<PatientRecord> b;
  for (int i = 0; i < 6; ++i) b.push_back(patient(0, i < 2, 0.5, 3.0));
  auto f = effective_counts(b, 3.0);
  CHECK(f.y_eff == 2.0);
  CHECK(f.n_eff == 6.0);

  std::vector<PatientRecord> c(3, patient(0, false, 0, 1.0));
  auto g = effective_counts(c, 3.0);
  CHECK(g.y_eff == 0.0);
  CHECK(g.n_eff == doctest::Approx(1.0));

  auto per = effective_dose_counts(a, 2, 3.0);
  CHECK(per.n[0] == doctest::Approx(2.5));
  CHECK(per.n[1] == 0.0);
}

TEST_CASE("suspension rule") {
  std::vector<PatientRecord> one_done{patient(1, false, 0, 3.0), patient(1, false, 0, 1.0),
                                      patient(1, false, 0, 0.5)};
  CHECK_FALSE(suspension_check(one_done, 1, 3.0));
  std::vector<PatientRecord> two_done{patient(1, false, 0, 3.0), patient(1, true, 0.4, 1.0),
                                      patient(1, false, 0, 0.5)};
  CHECK(suspension_check(two_done, 1, 3.0));
  CHECK(completed_at(two_done, 1, 3.0) == 2);
  CHECK(completed_at(two_done, 0, 3.0) == 0);
}

TEST_CASE("fully ascertained records give the complete-data decision") {
  auto g = standardize_doses({1, 2, 3, 4, 5}, DoseScale::linear);
  std::mt19937_64 rng(9);
  for (auto cfg : {skbd_config(0.3), keyboard_config(0.3), skbd_config(0.2)}) {
    for (int rep = 0; rep < 300; ++rep) {
      TrialData d(5);
      std::vector<PatientRecord> pts;
      int cohorts = 1 + static_cast<int>(rng() % 8);
      std::size_t cur = rng() % 5;
      d.n[cur] = 0;
      for (int c = 0; c < cohorts; ++c) {
        std::size_t dose = c == 0 ? cur : rng() % 5;
        for (int i = 0; i < 3; ++i) {
          bool dlt = rng() % 4 == 0;
          pts.push_back(patient(dose, dlt, 1.0, 3.0));
          d.add(dose, 1, dlt);
        }
      }
      auto eff = effective_dose_counts(pts, 5, 3.0);
      auto a = evaluate_decision(cfg, g, eff, d.n[cur], cur, std::nullopt);
      TrialState st;
      st.grid = g;
      st.data = d;
      st.current = cur;
      auto b = evaluate_decision(cfg, st);
      CHECK(a.action == b.action);
      CHECK(a.posterior.alpha == b.posterior.alpha);
      CHECK(a.posterior.beta == b.posterior.beta);
    }
  }
}
