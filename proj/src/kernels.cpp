#include "skbd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skbd/errors.hpp"

namespace skbd {

namespace {

double forward(DoseScale s, double raw) { return s == DoseScale::log ? std::log(raw) : raw; }

}  // namespace

double DoseGrid::to_std(double raw) const {
  if (scale == DoseScale::log && !(raw > 0.0))
    throw InvalidArgument("dose must be positive on the log scale");
  double lo = forward(scale, prespecified_min_raw);
  double hi = forward(scale, prespecified_max_raw);
  return (forward(scale, raw) - lo) / (hi - lo);
}

double DoseGrid::to_raw(double s) const {
  double lo = forward(scale, prespecified_min_raw);
  double hi = forward(scale, prespecified_max_raw);
  double v = lo + s * (hi - lo);
  return scale == DoseScale::log ? std::exp(v) : v;
}

double DoseGrid::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < std_doses.size(); ++i)
    g = std::min(g, std_doses[i] - std_doses[i - 1]);
  return g;
}

TrialData::TrialData(std::vector<int> n_, std::vector<int> y_)
    : n(std::move(n_)), y(std::move(y_)) {
  validate();
}

int TrialData::total() const { return std::accumulate(n.begin(), n.end(), 0); }

void TrialData::add(std::size_t dose, int patients, int dlts) {
  if (dose >= n.size()) throw InvalidArgument("dose index out of range");
  if (patients < 0 || dlts < 0 || dlts > patients)
    throw InvalidArgument("cohort must satisfy 0 <= y <= n");
  n[dose] += patients;
  y[dose] += dlts;
}

void TrialData::insert_empty(std::size_t pos) {
  if (pos > n.size()) throw InvalidArgument("insert position out of range");
  n.insert(n.begin() + static_cast<std::ptrdiff_t>(pos), 0);
  y.insert(y.begin() + static_cast<std::ptrdiff_t>(pos), 0);
}

void TrialData::validate() const {
  if (n.size() != y.size()) throw InvalidArgument("n and y differ in length");
  for (std::size_t j = 0; j < n.size(); ++j)
    if (n[j] < 0 || y[j] < 0 || y[j] > n[j])
      throw InvalidArgument("dose " + std::to_string(j + 1) + ": need 0 <= y <= n");
}

DoseCounts::DoseCounts(const TrialData& d) : n(d.n.begin(), d.n.end()), y(d.y.begin(), d.y.end()) {}

DoseGrid standardize_doses(const std::vector<double>& raw, DoseScale scale) {
  if (raw.size() < 2) throw InvalidArgument("need at least two doses");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw InvalidArgument("doses must be finite");
    if (scale == DoseScale::log && !(raw[i] > 0.0))
      throw InvalidArgument("log scale requires positive doses");
    if (i > 0 && !(raw[i] > raw[i - 1])) throw InvalidArgument("doses must be strictly increasing");
  }
  DoseGrid g;
  g.scale = scale;
  g.raw_doses = raw;
  g.prespecified_min_raw = raw.front();
  g.prespecified_max_raw = raw.back();
  g.inserted.assign(raw.size(), false);
  g.std_doses.reserve(raw.size());
  for (double r : raw) g.std_doses.push_back(g.to_std(r));
  g.std_doses.front() = 0.0;
  g.std_doses.back() = 1.0;
  g.sigma = g.min_gap();
  return g;
}

KernelSpec calibrate_kernel(double sigma, double k_lower, double k_upper) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("degenerate grid: sigma must be positive");
  if (!(k_lower > 0.0 && k_lower < 1.0)) throw InvalidArgument("k_lower must lie in (0, 1)");
  if (!(k_upper > 0.0 && k_upper < 1.0)) throw InvalidArgument("k_upper must lie in (0, 1)");
  KernelSpec k;
  k.sigma = sigma;
  k.theta1 = -std::log(k_lower) / (sigma * sigma);
  k.theta2 = -std::log(k_upper) / (sigma * sigma);
  k.kind = k_lower == k_upper ? KernelKind::symmetric_gaussian : KernelKind::asymmetric_gaussian;
  return k;
}

KernelSpec calibrate_kernel(const DoseGrid& grid, double k_lower, double k_upper) {
  return calibrate_kernel(grid.sigma, k_lower, k_upper);
}

KernelSpec kronecker_kernel() {
  KernelSpec k;
  k.kind = KernelKind::kronecker;
  return k;
}

double log_kernel_eval(const KernelSpec& spec, double d, double d_prime) {
  double delta = d - d_prime;
  if (spec.kind == KernelKind::kronecker)
    return std::fabs(delta) <= 1e-12 ? 0.0 : -std::numeric_limits<double>::infinity();
  double theta = d_prime <= d ? spec.theta1 : spec.theta2;
  return -theta * delta * delta;
}

double kernel_eval(const KernelSpec& spec, double d, double d_prime) {
  return std::exp(log_kernel_eval(spec, d, d_prime));
}

std::vector<double> normalized_weights(const KernelSpec& spec, const DoseGrid& grid,
                                       const DoseCounts& data, double query) {
  if (data.size() != grid.size()) throw InvalidArgument("data and grid differ in length");
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(grid.size(), ninf);
  double top = ninf;
  bool any = false;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (!(data.n[s] > 0.0)) continue;
    any = true;
    lw[s] = log_kernel_eval(spec, query, grid.std_doses[s]);
    top = std::max(top, lw[s]);
  }
  if (!any) throw NoDataError("no observed doses");
  std::vector<double> w(grid.size(), 0.0);
  if (top == ninf) return w;
  double total = 0.0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (lw[s] == ninf) continue;
    w[s] = std::exp(lw[s] - top);
    total += w[s];
  }
  for (double& v : w) v /= total;
  return w;
}

PseudoCounts pseudo_counts(const KernelSpec& spec, const DoseGrid& grid,
                           const DoseCounts& data, double query) {
  auto w = normalized_weights(spec, grid, data, query);
  PseudoCounts pc;
  for (std::size_t s = 0; s < w.size(); ++s) {
    pc.y_prime += w[s] * data.y[s];
    pc.n_prime += w[s] * data.n[s];
  }
  return pc;
}

PseudoCounts pseudo_counts(const KernelSpec& spec, const DoseGrid& grid,
                           const TrialData& data, double query) {
  return pseudo_counts(spec, grid, DoseCounts(data), query);
}

const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::asymmetric_gaussian: return "asymmetric_gaussian";
    case KernelKind::symmetric_gaussian: return "symmetric_gaussian";
    case KernelKind::kronecker: return "kronecker";
  }
  return "?";
}

const char* to_string(DoseScale s) { return s == DoseScale::log ? "log" : "linear"; }

}  // namespace skbd
