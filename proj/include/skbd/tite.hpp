#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "skbd/kernels.hpp"

namespace skbd {

struct PatientRecord {
  std::size_t dose_index = 0;
  double enroll_time = 0.0;
  bool dlt = false;
  double dlt_time = std::numeric_limits<double>::infinity();
  double followup = 0.0;

  bool dlt_observed() const { return dlt && dlt_time <= followup; }
  bool ascertained(double tau) const { return dlt_observed() || followup >= tau; }
};

struct EffectiveCounts {
  double y_eff = 0.0;
  double n_eff = 0.0;
};

struct TiteConfig {
  double tau = 3.0;
  double accrual_rate = 2.0;
  int min_completed = 2;

  void validate() const;
};

double follow_up_weight(const PatientRecord& p, double tau);

EffectiveCounts effective_counts(const std::vector<PatientRecord>& patients, double tau);

// Per-dose effective counts for a grid of the given size.
DoseCounts effective_dose_counts(const std::vector<PatientRecord>& patients, std::size_t doses,
                                 double tau);

int completed_at(const std::vector<PatientRecord>& patients, std::size_t dose, double tau);

bool suspension_check(const std::vector<PatientRecord>& patients, std::size_t current, double tau,
                      int min_completed = 2);

}  // namespace skbd
