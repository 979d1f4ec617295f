#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skbd/design.hpp"
#include "skbd/kernels.hpp"
#include "skbd/numerics.hpp"

namespace skbd {

struct InsertionConfig {
  double c1 = 0.6;
  double c2 = 0.6;
  BetaParams prior{0.5, 0.5};
  int candidate_points = 199;
  double symmetric_kernel_value = 0.05;
  int max_insertions = 3;
  // Recompute sigma on the working grid after each insertion.
  bool recalibrate_sigma = true;
  // Try a lower-boundary insertion before terminating on lowest-dose elimination.
  bool insertion_before_termination = false;

  void validate() const;
};

enum class TriggerKind { none, lower_boundary, interior, upper_boundary };

const char* to_string(TriggerKind k);

struct InsertionTrigger {
  TriggerKind kind = TriggerKind::none;
  std::optional<std::size_t> interval_index;
  std::string reason;
};

struct InsertionProbabilities {
  std::vector<double> p_over;
  std::vector<double> p_under;
  std::vector<double> p_over_raw;
  std::vector<double> p_under_raw;
};

struct QPoint {
  double std_dose = 0.0;
  double q = 0.0;
};

KernelSpec insertion_kernel(const DoseGrid& grid, const InsertionConfig& cfg);

BetaParams insertion_posterior(double d, const DoseGrid& grid, const TrialData& data,
                               const InsertionConfig& cfg);

InsertionProbabilities insertion_probabilities(const DoseGrid& grid, const TrialData& data,
                                               const InsertionConfig& cfg, double phi, double eps1,
                                               double eps2);

InsertionTrigger check_insertion(const TrialState& state, const InsertionConfig& cfg, double phi,
                                 double eps1, double eps2);

std::vector<QPoint> q_curve(std::size_t r, const DoseGrid& grid, const TrialData& data,
                            const InsertionConfig& cfg, double phi, double eps1, double eps2);

double choose_interior_dose(std::size_t r, const DoseGrid& grid, const TrialData& data,
                            const InsertionConfig& cfg, double phi, double eps1, double eps2);

double boundary_dose(TriggerKind kind, const DoseGrid& grid);

struct AugmentedGrid {
  DoseGrid grid;
  std::size_t index = 0;
};

AugmentedGrid augment_grid(const DoseGrid& grid, double new_raw, bool recalibrate = false);

// Raw dose proposed by a trigger; throws on a duplicate boundary dose.
double proposed_dose(const InsertionTrigger& trigger, const TrialState& state,
                     const InsertionConfig& cfg, double phi, double eps1, double eps2);

// Inserts the dose into grid and data and shifts the state's indices; returns the new index.
std::size_t apply_insertion(TrialState& state, double new_raw, bool recalibrate);

}  // namespace skbd
