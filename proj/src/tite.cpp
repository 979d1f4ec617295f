#include "skbd/tite.hpp"

#include <cmath>

#include "skbd/errors.hpp"

namespace skbd {

void TiteConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tite.tau", "must be positive");
  if (!(accrual_rate > 0.0) || !std::isfinite(accrual_rate))
    throw ConfigError("tite.accrual_rate", "must be positive");
  if (min_completed < 0) throw ConfigError("tite.min_completed", "must be nonnegative");
}

double follow_up_weight(const PatientRecord& p, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (p.followup < 0.0) throw InvalidArgument("follow-up must be nonnegative");
  if (p.followup > tau * (1.0 + 1e-12)) throw InvalidArgument("follow-up exceeds tau");
  if (p.ascertained(tau)) return 1.0;
  return p.followup / tau;
}

EffectiveCounts effective_counts(const std::vector<PatientRecord>& patients, double tau) {
  EffectiveCounts e;
  for (const auto& p : patients) {
    double w = follow_up_weight(p, tau);
    if (p.dlt_observed()) e.y_eff += 1.0;
    e.n_eff += w;
  }
  return e;
}

DoseCounts effective_dose_counts(const std::vector<PatientRecord>& patients, std::size_t doses,
                                 double tau) {
  DoseCounts c;
  c.n.assign(doses, 0.0);
  c.y.assign(doses, 0.0);
  for (const auto& p : patients) {
    if (p.dose_index >= doses) throw InvalidArgument("patient dose index out of range");
    c.n[p.dose_index] += follow_up_weight(p, tau);
    if (p.dlt_observed()) c.y[p.dose_index] += 1.0;
  }
  return c;
}

int completed_at(const std::vector<PatientRecord>& patients, std::size_t dose, double tau) {
  int k = 0;
  for (const auto& p : patients)
    if (p.dose_index == dose && p.ascertained(tau)) ++k;
  return k;
}

bool suspension_check(const std::vector<PatientRecord>& patients, std::size_t current, double tau,
                      int min_completed) {
  return completed_at(patients, current, tau) >= min_completed;
}

}  // namespace skbd
