#pragma once

#include <cstddef>
#include <vector>

namespace skbd {

enum class DoseScale { linear, log };

struct DoseGrid {
  std::vector<double> raw_doses;
  std::vector<double> std_doses;
  DoseScale scale = DoseScale::linear;
  std::vector<bool> inserted;
  double prespecified_max_raw = 0.0;
  double prespecified_min_raw = 0.0;
  // Smallest standardized neighbour gap used for kernel calibration.
  double sigma = 0.0;

  std::size_t size() const { return raw_doses.size(); }
  double to_std(double raw) const;
  double to_raw(double std_dose) const;
  double min_gap() const;
};

struct TrialData {
  std::vector<int> n;
  std::vector<int> y;

  TrialData() = default;
  explicit TrialData(std::size_t m) : n(m, 0), y(m, 0) {}
  TrialData(std::vector<int> n_, std::vector<int> y_);

  std::size_t size() const { return n.size(); }
  int total() const;
  void add(std::size_t dose, int patients, int dlts);
  void insert_empty(std::size_t pos);
  void validate() const;
};

// Effective (possibly fractional) counts; what the kernel actually consumes.
struct DoseCounts {
  std::vector<double> n;
  std::vector<double> y;

  DoseCounts() = default;
  explicit DoseCounts(const TrialData& d);
  std::size_t size() const { return n.size(); }
};

enum class KernelKind { asymmetric_gaussian, symmetric_gaussian, kronecker };

struct KernelSpec {
  KernelKind kind = KernelKind::asymmetric_gaussian;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double sigma = 0.0;
};

struct PseudoCounts {
  double y_prime = 0.0;
  double n_prime = 0.0;
};

DoseGrid standardize_doses(const std::vector<double>& raw, DoseScale scale);

KernelSpec calibrate_kernel(double sigma, double k_lower, double k_upper);
KernelSpec calibrate_kernel(const DoseGrid& grid, double k_lower, double k_upper);
KernelSpec kronecker_kernel();

double kernel_eval(const KernelSpec& spec, double d, double d_prime);
double log_kernel_eval(const KernelSpec& spec, double d, double d_prime);

// Weights over all grid doses, zero where n == 0, summing to 1 over the rest.
std::vector<double> normalized_weights(const KernelSpec& spec, const DoseGrid& grid,
                                       const DoseCounts& data, double query);

PseudoCounts pseudo_counts(const KernelSpec& spec, const DoseGrid& grid,
                           const DoseCounts& data, double query);
PseudoCounts pseudo_counts(const KernelSpec& spec, const DoseGrid& grid,
                           const TrialData& data, double query);

const char* to_string(KernelKind k);
const char* to_string(DoseScale s);

}  // namespace skbd
