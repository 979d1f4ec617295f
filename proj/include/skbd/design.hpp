#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skbd/kernels.hpp"
#include "skbd/numerics.hpp"

namespace skbd {

struct KeyPartition {
  double phi = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::vector<double> boundaries;
  std::size_t target_index = 0;

  std::size_t size() const { return boundaries.size() - 1; }
  double lo(std::size_t k) const { return boundaries[k]; }
  double hi(std::size_t k) const { return boundaries[k + 1]; }
};

// Kernel given by its nearest-neighbour values; thetas follow from the grid's sigma.
struct KernelSettings {
  KernelKind kind = KernelKind::asymmetric_gaussian;
  double k_lower = 0.2;
  double k_upper = 0.8;
};

struct DesignConfig {
  double phi = 0.3;
  double eps1 = 0.05;
  double eps2 = 0.05;
  BetaParams prior{1.0, 1.0};
  KernelSettings kernel;
  double elimination_cutoff = 0.95;
  int elimination_min_n = 3;
  int cohort_size = 3;
  int max_n = 30;
  BetaParams selection_prior{0.01, 0.01};
  // 0 selects without borrowing.
  double selection_kernel_value = 0.2;

  KernelSpec decision_kernel(const DoseGrid& grid) const;
  KernelSpec selection_kernel(const DoseGrid& grid) const;
  void validate() const;
};

DesignConfig keyboard_config(double phi);
DesignConfig skbd_config(double phi);

enum class ActionKind { escalate, stay, de_escalate, eliminate_and_de_escalate, terminate };

struct Action {
  ActionKind kind = ActionKind::stay;
  bool operator==(const Action&) const = default;
};

const char* to_string(ActionKind a);

struct TrialState {
  DoseGrid grid;
  TrialData data;
  std::size_t current = 0;
  std::optional<std::size_t> eliminated_from;
  int insertions = 0;

  int enrolled() const { return data.total(); }
  // One past the highest dose still open.
  std::size_t open_limit() const { return eliminated_from ? *eliminated_from : grid.size(); }
};

struct DecisionDetail {
  PseudoCounts pseudo;
  BetaParams posterior;
  std::vector<double> key_probs;
  std::size_t strongest = 0;
  std::size_t target = 0;
  double prob_above_phi = 0.0;
  bool eliminate = false;
  // Before clamping at grid edges.
  ActionKind unconstrained = ActionKind::stay;
  ActionKind action = ActionKind::stay;
};

KeyPartition build_keys(double phi, double eps1, double eps2);

std::size_t strongest_key(const BetaParams& posterior, const KeyPartition& keys);
std::vector<double> key_probabilities(const BetaParams& posterior, const KeyPartition& keys);

// Full decision computation. `counts` may be fractional (TITE effective counts);
// `enrolled_at_current` feeds the elimination sample-size qualifier.
DecisionDetail evaluate_decision(const DesignConfig& config, const DoseGrid& grid,
                                 const DoseCounts& counts, int enrolled_at_current,
                                 std::size_t current, std::optional<std::size_t> eliminated_from);

DecisionDetail evaluate_decision(const DesignConfig& config, const TrialState& state);

Action decide(const DesignConfig& config, const TrialState& state);

struct TableRow {
  int n = 0;
  std::optional<int> escalate_le;
  std::optional<int> deescalate_ge;
  std::optional<int> eliminate_ge;
};

std::vector<TableRow> decision_table(const DesignConfig& config, const DoseGrid& grid,
                                     const TrialData& context, std::size_t current,
                                     int n_min, int n_max);

// Isotonic posterior means over tried doses (NaN where untried).
std::vector<double> selection_estimates(const DesignConfig& config, const DoseGrid& grid,
                                        const TrialData& data);

std::optional<std::size_t> select_mtd(const DesignConfig& config, const DoseGrid& grid,
                                      const TrialData& data,
                                      std::optional<std::size_t> eliminated_from);

}  // namespace skbd
