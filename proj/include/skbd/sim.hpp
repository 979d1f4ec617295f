#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skbd/design.hpp"
#include "skbd/insertion.hpp"
#include "skbd/rng.hpp"
#include "skbd/scenarios.hpp"
#include "skbd/tite.hpp"

namespace skbd {

struct MetricOptions {
  double rod_threshold = 0.6;
  bool rod_inclusive = false;
};

// Everything needed to simulate one design. The target rate comes from the scenario.
struct SimDesign {
  std::string name = "SKBD";
  DesignConfig design;
  std::optional<InsertionConfig> insertion;
  std::optional<TiteConfig> tite;
  DoseScale scale = DoseScale::linear;
  std::optional<std::vector<double>> doses;
  MetricOptions metrics;

  void validate() const;
};

struct PathStep {
  int cohort = 0;
  std::size_t dose_index = 0;
  double raw_dose = 0.0;
  int n = 0;
  int y = 0;
  std::string action;
};

struct InsertionEvent {
  int cohort = 0;
  double raw_dose = 0.0;
  double std_dose = 0.0;
  TriggerKind kind = TriggerKind::none;
};

struct TrialRecord {
  std::optional<std::size_t> selected_mtd;
  std::vector<double> raw_doses;
  std::vector<bool> inserted_flags;
  std::vector<int> allocations;
  std::vector<int> dlts;
  std::vector<PathStep> path;
  std::vector<InsertionEvent> insertions;
  bool terminated_early = false;
  int realized_n = 0;

  std::optional<double> selected_dose() const;
};

struct OCSummary {
  std::string scenario;
  std::string design;
  std::optional<double> pcs;
  std::optional<double> pca;
  double above_mtd = 0.0;
  double rod = 0.0;
  double no_selection = 0.0;
  double mean_n = 0.0;
  std::optional<double> modification_rate;
  std::optional<double> inserted_mean;
  std::optional<double> inserted_sd;
  std::optional<double> inserted_selection;
  std::optional<double> inserted_allocation;
  std::vector<double> per_dose_selection;
  std::vector<double> per_dose_allocation;
  long replicates = 0;
  std::uint64_t seed = 0;
};

// Checks that the scenario fits the design's dose grid.
void check_compatible(const SimDesign& d, const Scenario& s);

TrialRecord run_trial(const SimDesign& d, const Scenario& s, Stream& rng);

std::vector<TrialRecord> run_records(const SimDesign& d, const Scenario& s, long replicates,
                                     std::uint64_t seed, int threads = 1,
                                     std::atomic<long>* progress = nullptr);

OCSummary oc_metrics(const std::vector<TrialRecord>& records, const Scenario& s,
                     const MetricOptions& opt = {}, bool insertion_metrics = false);

OCSummary run_trials(const SimDesign& d, const Scenario& s, long replicates, std::uint64_t seed,
                     int threads = 1, std::atomic<long>* progress = nullptr);

}  // namespace skbd
