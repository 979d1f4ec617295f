#include "skbd/insertion.hpp"

#include <algorithm>
#include <cmath>

#include "skbd/errors.hpp"

namespace skbd {

void InsertionConfig::validate() const {
  if (!(c1 > 0.0 && c1 < 1.0)) throw ConfigError("insertion.c1", "must lie in (0, 1)");
  if (!(c2 > 0.0 && c2 < 1.0)) throw ConfigError("insertion.c2", "must lie in (0, 1)");
  if (!(prior.alpha > 0.0)) throw ConfigError("insertion.prior.alpha", "must be positive");
  if (!(prior.beta > 0.0)) throw ConfigError("insertion.prior.beta", "must be positive");
  if (candidate_points < 1) throw ConfigError("insertion.candidate_points", "must be at least 1");
  if (!(symmetric_kernel_value > 0.0 && symmetric_kernel_value < 1.0))
    throw ConfigError("insertion.symmetric_kernel_value", "must lie in (0, 1)");
  if (max_insertions < 0) throw ConfigError("insertion.max_insertions", "must be nonnegative");
}

const char* to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::none: return "none";
    case TriggerKind::lower_boundary: return "lower_boundary";
    case TriggerKind::interior: return "interior";
    case TriggerKind::upper_boundary: return "upper_boundary";
  }
  return "?";
}

KernelSpec insertion_kernel(const DoseGrid& grid, const InsertionConfig& cfg) {
  return calibrate_kernel(grid.sigma, cfg.symmetric_kernel_value, cfg.symmetric_kernel_value);
}

namespace {

BetaParams posterior_at(double d, const KernelSpec& k, const DoseGrid& grid,
                        const DoseCounts& counts, const BetaParams& prior) {
  PseudoCounts pc = pseudo_counts(k, grid, counts, d);
  return {prior.alpha + pc.y_prime, prior.beta + pc.n_prime - pc.y_prime};
}

}  // namespace

BetaParams insertion_posterior(double d, const DoseGrid& grid, const TrialData& data,
                               const InsertionConfig& cfg) {
  return posterior_at(d, insertion_kernel(grid, cfg), grid, DoseCounts(data), cfg.prior);
}

InsertionProbabilities insertion_probabilities(const DoseGrid& grid, const TrialData& data,
                                               const InsertionConfig& cfg, double phi, double eps1,
                                               double eps2) {
  KernelSpec k = insertion_kernel(grid, cfg);
  DoseCounts counts(data);
  InsertionProbabilities out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    BetaParams post = posterior_at(grid.std_doses[r], k, grid, counts, cfg.prior);
    out.p_over_raw.push_back(1.0 - reg_inc_beta(phi + eps2, post));
    out.p_under_raw.push_back(reg_inc_beta(phi - eps1, post));
  }
  out.p_over = pava(out.p_over_raw, Monotone::nondecreasing);
  out.p_under = pava(out.p_under_raw, Monotone::nonincreasing);
  return out;
}

InsertionTrigger check_insertion(const TrialState& state, const InsertionConfig& cfg, double phi,
                                 double eps1, double eps2) {
  InsertionTrigger t;
  if (state.insertions >= cfg.max_insertions) {
    t.reason = "budget";
    return t;
  }
  const std::size_t m = state.grid.size();
  auto pr = insertion_probabilities(state.grid, state.data, cfg, phi, eps1, eps2);
  if (state.current == 0 && pr.p_over[0] > cfg.c2) {
    t.kind = TriggerKind::lower_boundary;
    t.reason = "lowest dose likely above the target interval";
    return t;
  }
  for (std::size_t r = 0; r + 1 < m; ++r) {
    if (pr.p_under[r] > cfg.c1 && pr.p_over[r + 1] > cfg.c2) {
      t.kind = TriggerKind::interior;
      t.interval_index = r;
      t.reason = "target interval lies between adjacent doses";
      return t;
    }
  }
  if (state.current + 1 == m && pr.p_under[m - 1] > cfg.c1) {
    t.kind = TriggerKind::upper_boundary;
    t.reason = "highest dose likely below the target interval";
    return t;
  }
  t.reason = "no trigger";
  return t;
}

std::vector<QPoint> q_curve(std::size_t r, const DoseGrid& grid, const TrialData& data,
                            const InsertionConfig& cfg, double phi, double eps1, double eps2) {
  if (r + 1 >= grid.size()) throw InvalidArgument("interval index out of range");
  double lo = grid.std_doses[r], hi = grid.std_doses[r + 1];
  if (hi - lo < 1e-9) throw InvalidArgument("degenerate interval");
  KernelSpec k = insertion_kernel(grid, cfg);
  DoseCounts counts(data);
  const int n = cfg.candidate_points;
  std::vector<QPoint> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) {
    double d = lo + (hi - lo) * i / (n + 1.0);
    BetaParams post = posterior_at(d, k, grid, counts, cfg.prior);
    out.push_back({d, beta_interval_prob(post, phi - eps1, phi + eps2)});
  }
  return out;
}

double choose_interior_dose(std::size_t r, const DoseGrid& grid, const TrialData& data,
                            const InsertionConfig& cfg, double phi, double eps1, double eps2) {
  auto curve = q_curve(r, grid, data, cfg, phi, eps1, eps2);
  double mid = 0.5 * (grid.std_doses[r] + grid.std_doses[r + 1]);
  double best = -1.0;
  for (const auto& p : curve) best = std::max(best, p.q);
  std::size_t pick = curve.size();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].q < best - 1e-12) continue;
    if (pick == curve.size() ||
        std::fabs(curve[i].std_dose - mid) < std::fabs(curve[pick].std_dose - mid) - 1e-15)
      pick = i;
  }
  return curve[pick].std_dose;
}

namespace {

bool contains(const DoseGrid& g, double raw) {
  for (double d : g.raw_doses)
    if (std::fabs(d - raw) <= 1e-9 * std::max(1.0, std::fabs(raw))) return true;
  return false;
}

}  // namespace

double boundary_dose(TriggerKind kind, const DoseGrid& grid) {
  double d;
  if (kind == TriggerKind::lower_boundary) d = grid.raw_doses.front() / 2.0;
  else if (kind == TriggerKind::upper_boundary) d = 1.5 * grid.prespecified_max_raw;
  else throw InvalidArgument("boundary_dose needs a boundary trigger");
  if (contains(grid, d)) throw InvalidArgument("duplicate dose: boundary dose already in grid");
  return d;
}

AugmentedGrid augment_grid(const DoseGrid& grid, double new_raw, bool recalibrate) {
  if (!(new_raw > 0.0) || !std::isfinite(new_raw)) throw InvalidArgument("dose must be positive");
  if (contains(grid, new_raw)) throw InvalidArgument("duplicate dose");
  AugmentedGrid out;
  out.grid = grid;
  auto pos = std::upper_bound(grid.raw_doses.begin(), grid.raw_doses.end(), new_raw) -
             grid.raw_doses.begin();
  out.index = static_cast<std::size_t>(pos);
  auto& g = out.grid;
  g.raw_doses.insert(g.raw_doses.begin() + pos, new_raw);
  g.std_doses.insert(g.std_doses.begin() + pos, grid.to_std(new_raw));
  g.inserted.insert(g.inserted.begin() + pos, true);
  if (recalibrate) g.sigma = g.min_gap();
  return out;
}

double proposed_dose(const InsertionTrigger& trigger, const TrialState& state,
                     const InsertionConfig& cfg, double phi, double eps1, double eps2) {
  switch (trigger.kind) {
    case TriggerKind::interior:
      return state.grid.to_raw(choose_interior_dose(*trigger.interval_index, state.grid,
                                                    state.data, cfg, phi, eps1, eps2));
    case TriggerKind::lower_boundary:
    case TriggerKind::upper_boundary:
      return boundary_dose(trigger.kind, state.grid);
    case TriggerKind::none: break;
  }
  throw InvalidArgument("no insertion proposed");
}

std::size_t apply_insertion(TrialState& state, double new_raw, bool recalibrate) {
  auto aug = augment_grid(state.grid, new_raw, recalibrate);
  state.grid = std::move(aug.grid);
  state.data.insert_empty(aug.index);
  if (state.current >= aug.index) ++state.current;
  if (state.eliminated_from && *state.eliminated_from >= aug.index) ++*state.eliminated_from;
  ++state.insertions;
  return aug.index;
}

}  // namespace skbd
