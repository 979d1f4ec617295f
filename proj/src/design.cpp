#include "skbd/design.hpp"

#include <cmath>
#include <limits>

#include "skbd/errors.hpp"

namespace skbd {

namespace {

void check_prob(double v, const char* field, bool allow_zero = false) {
  bool ok = allow_zero ? (v >= 0.0 && v < 1.0) : (v > 0.0 && v < 1.0);
  if (!ok || !std::isfinite(v)) throw ConfigError(field, "must lie in (0, 1)");
}

}  // namespace

KernelSpec DesignConfig::decision_kernel(const DoseGrid& grid) const {
  if (kernel.kind == KernelKind::kronecker) return kronecker_kernel();
  if (kernel.kind == KernelKind::symmetric_gaussian)
    return calibrate_kernel(grid.sigma, kernel.k_lower, kernel.k_lower);
  return calibrate_kernel(grid.sigma, kernel.k_lower, kernel.k_upper);
}

KernelSpec DesignConfig::selection_kernel(const DoseGrid& grid) const {
  if (selection_kernel_value == 0.0) return kronecker_kernel();
  return calibrate_kernel(grid.sigma, selection_kernel_value, selection_kernel_value);
}

void DesignConfig::validate() const {
  check_prob(phi, "phi");
  if (!(eps1 > 0.0)) throw ConfigError("eps1", "must be positive");
  if (!(eps2 > 0.0)) throw ConfigError("eps2", "must be positive");
  if (!(phi - eps1 > 0.0)) throw ConfigError("eps1", "phi - eps1 must be positive");
  if (!(phi + eps2 < 1.0)) throw ConfigError("eps2", "phi + eps2 must be below 1");
  if (!(prior.alpha > 0.0)) throw ConfigError("prior.alpha", "must be positive");
  if (!(prior.beta > 0.0)) throw ConfigError("prior.beta", "must be positive");
  if (kernel.kind != KernelKind::kronecker) {
    check_prob(kernel.k_lower, "kernel.k_lower");
    if (kernel.kind == KernelKind::asymmetric_gaussian) check_prob(kernel.k_upper, "kernel.k_upper");
  }
  check_prob(elimination_cutoff, "elimination_cutoff");
  if (elimination_min_n < 0) throw ConfigError("elimination_min_n", "must be nonnegative");
  if (cohort_size < 1) throw ConfigError("cohort_size", "must be at least 1");
  if (max_n < 1) throw ConfigError("max_n", "must be at least 1");
  if (!(selection_prior.alpha > 0.0)) throw ConfigError("selection_prior.alpha", "must be positive");
  if (!(selection_prior.beta > 0.0)) throw ConfigError("selection_prior.beta", "must be positive");
  check_prob(selection_kernel_value, "selection_kernel_value", true);
}

DesignConfig keyboard_config(double phi) {
  DesignConfig c;
  c.phi = phi;
  c.kernel.kind = KernelKind::kronecker;
  return c;
}

DesignConfig skbd_config(double phi) {
  DesignConfig c;
  c.phi = phi;
  return c;
}

const char* to_string(ActionKind a) {
  switch (a) {
    case ActionKind::escalate: return "escalate";
    case ActionKind::stay: return "stay";
    case ActionKind::de_escalate: return "de_escalate";
    case ActionKind::eliminate_and_de_escalate: return "eliminate_and_de_escalate";
    case ActionKind::terminate: return "terminate";
  }
  return "?";
}

KeyPartition build_keys(double phi, double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0) || !(phi - eps1 > 0.0) || !(phi + eps2 < 1.0))
    throw InvalidArgument("invalid target interval");
  const double w = eps1 + eps2;
  const double tol = 1e-9;
  KeyPartition k;
  k.phi = phi;
  k.eps1 = eps1;
  k.eps2 = eps2;
  std::vector<double> below;
  for (int i = 0;; ++i) {
    double b = phi - eps1 - i * w;
    if (b <= tol) break;
    below.push_back(b);
  }
  k.boundaries.push_back(0.0);
  for (auto it = below.rbegin(); it != below.rend(); ++it) k.boundaries.push_back(*it);
  k.target_index = k.boundaries.size() - 1;
  for (int i = 0;; ++i) {
    double b = phi + eps2 + i * w;
    if (b >= 1.0 - tol) break;
    k.boundaries.push_back(b);
  }
  k.boundaries.push_back(1.0);
  return k;
}

std::vector<double> key_probabilities(const BetaParams& posterior, const KeyPartition& keys) {
  std::vector<double> cdf(keys.boundaries.size());
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = reg_inc_beta(keys.boundaries[i], posterior);
  std::vector<double> p(keys.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::max(0.0, cdf[k + 1] - cdf[k]);
  return p;
}

namespace {

std::size_t argmax_high(const std::vector<double>& p) {
  double best = -1.0;
  for (double v : p) best = std::max(best, v);
  std::size_t idx = 0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] >= best - 1e-12) idx = k;
  return idx;
}

}  // namespace

std::size_t strongest_key(const BetaParams& posterior, const KeyPartition& keys) {
  return argmax_high(key_probabilities(posterior, keys));
}

DecisionDetail evaluate_decision(const DesignConfig& config, const DoseGrid& grid,
                                 const DoseCounts& counts, int enrolled_at_current,
                                 std::size_t current, std::optional<std::size_t> eliminated_from) {
  if (counts.size() != grid.size()) throw InvalidArgument("data and grid differ in length");
  if (current >= grid.size()) throw InvalidArgument("current dose out of range");
  if (!(counts.n[current] > 0.0)) throw NoDataError("no data at the current dose");

  DecisionDetail d;
  KeyPartition keys = build_keys(config.phi, config.eps1, config.eps2);
  d.pseudo = pseudo_counts(config.decision_kernel(grid), grid, counts, grid.std_doses[current]);
  d.posterior = {config.prior.alpha + d.pseudo.y_prime,
                 config.prior.beta + d.pseudo.n_prime - d.pseudo.y_prime};
  d.key_probs = key_probabilities(d.posterior, keys);
  d.strongest = argmax_high(d.key_probs);
  d.target = keys.target_index;
  d.prob_above_phi = 1.0 - reg_inc_beta(config.phi, d.posterior);
  d.eliminate = d.prob_above_phi > config.elimination_cutoff &&
                enrolled_at_current >= config.elimination_min_n;

  if (d.strongest < d.target) d.unconstrained = ActionKind::escalate;
  else if (d.strongest > d.target) d.unconstrained = ActionKind::de_escalate;
  else d.unconstrained = ActionKind::stay;

  std::size_t limit = eliminated_from ? *eliminated_from : grid.size();
  if (d.eliminate) {
    d.action = current == 0 ? ActionKind::terminate : ActionKind::eliminate_and_de_escalate;
  } else if (d.unconstrained == ActionKind::escalate) {
    d.action = current + 1 < limit ? ActionKind::escalate : ActionKind::stay;
  } else if (d.unconstrained == ActionKind::de_escalate) {
    d.action = current > 0 ? ActionKind::de_escalate : ActionKind::stay;
  } else {
    d.action = ActionKind::stay;
  }
  return d;
}

DecisionDetail evaluate_decision(const DesignConfig& config, const TrialState& state) {
  state.data.validate();
  return evaluate_decision(config, state.grid, DoseCounts(state.data),
                           state.current < state.data.size() ? state.data.n[state.current] : 0,
                           state.current, state.eliminated_from);
}

Action decide(const DesignConfig& config, const TrialState& state) {
  return Action{evaluate_decision(config, state).action};
}

std::vector<TableRow> decision_table(const DesignConfig& config, const DoseGrid& grid,
                                     const TrialData& context, std::size_t current,
                                     int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw InvalidArgument("invalid n range");
  if (context.size() != grid.size()) throw InvalidArgument("context and grid differ in length");
  if (current >= grid.size()) throw InvalidArgument("current dose out of range");
  context.validate();
  if (context.n[current] != 0) throw InvalidArgument("context must have no data at the current dose");

  std::vector<TableRow> rows;
  DoseCounts counts(context);
  for (int n = n_min; n <= n_max; ++n) {
    TableRow row;
    row.n = n;
    std::vector<bool> esc(n + 1), de(n + 1), el(n + 1);
    for (int y = 0; y <= n; ++y) {
      counts.n[current] = n;
      counts.y[current] = y;
      auto d = evaluate_decision(config, grid, counts, n, current, std::nullopt);
      el[y] = d.eliminate;
      esc[y] = !d.eliminate && d.unconstrained == ActionKind::escalate;
      de[y] = d.eliminate || d.unconstrained == ActionKind::de_escalate;
    }
    // A boundary exists only when the action depends on y at this n.
    auto proper = [n](const std::vector<bool>& r) {
      int c = 0;
      for (bool b : r) c += b;
      return c > 0 && c < n + 1;
    };
    if (proper(esc))
      for (int y = n; y >= 0; --y)
        if (esc[y]) { row.escalate_le = y; break; }
    if (proper(de))
      for (int y = 0; y <= n; ++y)
        if (de[y]) { row.deescalate_ge = y; break; }
    if (proper(el))
      for (int y = 0; y <= n; ++y)
        if (el[y]) { row.eliminate_ge = y; break; }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> selection_estimates(const DesignConfig& config, const DoseGrid& grid,
                                        const TrialData& data) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(grid.size(), nan);
  std::vector<std::size_t> tried;
  for (std::size_t j = 0; j < data.size(); ++j)
    if (data.n[j] > 0) tried.push_back(j);
  if (tried.empty()) return out;
  KernelSpec k = config.selection_kernel(grid);
  DoseCounts counts(data);
  const double a = config.selection_prior.alpha, b = config.selection_prior.beta;
  std::vector<double> means, weights;
  for (std::size_t j : tried) {
    PseudoCounts pc = pseudo_counts(k, grid, counts, grid.std_doses[j]);
    means.push_back((a + pc.y_prime) / (a + b + pc.n_prime));
    weights.push_back(pc.n_prime + a + b);
  }
  auto adj = pava(means, weights, Monotone::nondecreasing);
  for (std::size_t i = 0; i < tried.size(); ++i) out[tried[i]] = adj[i];
  return out;
}

std::optional<std::size_t> select_mtd(const DesignConfig& config, const DoseGrid& grid,
                                      const TrialData& data,
                                      std::optional<std::size_t> eliminated_from) {
  if (eliminated_from && *eliminated_from == 0) return std::nullopt;
  auto est = selection_estimates(config, grid, data);
  std::size_t limit = eliminated_from ? *eliminated_from : grid.size();
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < limit && j < est.size(); ++j)
    if (!std::isnan(est[j])) best_gap = std::min(best_gap, std::fabs(est[j] - config.phi));
  // Among tied doses, the highest one still below the target, else the lowest.
  std::optional<std::size_t> below, other;
  for (std::size_t j = 0; j < limit && j < est.size(); ++j) {
    if (std::isnan(est[j]) || std::fabs(est[j] - config.phi) > best_gap + 1e-12) continue;
    if (est[j] < config.phi) below = j;
    else if (!other) other = j;
  }
  return below ? below : other;
}

}  // namespace skbd
