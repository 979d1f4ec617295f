#include "skbd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "skbd/errors.hpp"

namespace skbd {

void SimDesign::validate() const {
  DesignConfig probe = design;
  probe.validate();
  if (insertion) insertion->validate();
  if (tite) tite->validate();
  if (insertion && tite) throw ConfigError("tite", "insertion and TITE cannot be combined");
  if (!(metrics.rod_threshold > 0.0 && metrics.rod_threshold <= 1.0))
    throw ConfigError("simulation.rod_threshold", "must lie in (0, 1]");
}

std::optional<double> TrialRecord::selected_dose() const {
  if (!selected_mtd) return std::nullopt;
  return raw_doses[*selected_mtd];
}

void check_compatible(const SimDesign& d, const Scenario& s) {
  s.validate();
  if (d.doses) {
    if (d.doses->size() != s.raw_doses.size())
      throw MismatchError("scenario '" + s.name + "' has " + std::to_string(s.raw_doses.size()) +
                          " doses, design grid has " + std::to_string(d.doses->size()));
    for (std::size_t i = 0; i < s.raw_doses.size(); ++i)
      if (std::fabs((*d.doses)[i] - s.raw_doses[i]) > 1e-9 * std::max(1.0, s.raw_doses[i]))
        throw MismatchError("scenario '" + s.name + "' doses differ from the design grid");
  }
}

namespace {

DesignConfig with_target(const SimDesign& d, const Scenario& s) {
  DesignConfig c = d.design;
  c.phi = s.phi;
  return c;
}

TrialRecord finish(const TrialState& st, const DesignConfig& cfg, bool terminated,
                   std::vector<PathStep> path, std::vector<InsertionEvent> events) {
  TrialRecord r;
  r.raw_doses = st.grid.raw_doses;
  r.inserted_flags = st.grid.inserted;
  r.allocations = st.data.n;
  r.dlts = st.data.y;
  r.realized_n = st.data.total();
  r.terminated_early = terminated;
  r.path = std::move(path);
  r.insertions = std::move(events);
  if (!terminated) r.selected_mtd = select_mtd(cfg, st.grid, st.data, st.eliminated_from);
  return r;
}

void move_by(TrialState& st, ActionKind a) {
  if (a == ActionKind::escalate) ++st.current;
  else if (a == ActionKind::de_escalate || a == ActionKind::eliminate_and_de_escalate) --st.current;
}

TrialRecord run_complete(const SimDesign& d, const Scenario& s, Stream& rng) {
  const DesignConfig cfg = with_target(d, s);
  const InsertionConfig* ins = d.insertion ? &*d.insertion : nullptr;
  TrialState st;
  st.grid = standardize_doses(s.raw_doses, d.scale);
  st.data = TrialData(st.grid.size());
  std::vector<PathStep> path;
  std::vector<InsertionEvent> events;
  int cohort = 0;

  auto try_insert = [&](bool lower_only) -> bool {
    if (!ins) return false;
    InsertionTrigger t = check_insertion(st, *ins, cfg.phi, cfg.eps1, cfg.eps2);
    if (t.kind == TriggerKind::none) return false;
    if (lower_only && t.kind != TriggerKind::lower_boundary) return false;
    double raw;
    try {
      raw = proposed_dose(t, st, *ins, cfg.phi, cfg.eps1, cfg.eps2);
    } catch (const InvalidArgument&) {
      return false;
    }
    if (st.eliminated_from && !lower_only && raw >= st.grid.raw_doses[*st.eliminated_from])
      return false;
    std::size_t idx = apply_insertion(st, raw, ins->recalibrate_sigma);
    st.current = idx;
    if (lower_only) st.eliminated_from = idx + 1;
    events.push_back({cohort, raw, st.grid.std_doses[idx], t.kind});
    return true;
  };

  while (st.data.total() < cfg.max_n) {
    int size = std::min(cfg.cohort_size, cfg.max_n - st.data.total());
    double p = s.tox_at(st.grid.raw_doses[st.current]);
    int y = rng.binomial(size, p);
    st.data.add(st.current, size, y);
    ++cohort;
    path.push_back({cohort, st.current, st.grid.raw_doses[st.current], size, y, ""});
    const bool more = st.data.total() < cfg.max_n;

    DecisionDetail det = evaluate_decision(cfg, st);
    if (det.eliminate) {
      st.eliminated_from = std::min(st.eliminated_from.value_or(st.grid.size()), st.current);
      if (st.current == 0) {
        if (more && ins && ins->insertion_before_termination && try_insert(true)) {
          path.back().action = "insert";
          continue;
        }
        path.back().action = "terminate";
        return finish(st, cfg, true, std::move(path), std::move(events));
      }
    }
    if (more && try_insert(false)) {
      path.back().action = "insert";
      continue;
    }
    path.back().action = to_string(det.action);
    move_by(st, det.action);
  }
  return finish(st, cfg, false, std::move(path), std::move(events));
}

TrialRecord run_tite(const SimDesign& d, const Scenario& s, Stream& rng) {
  const DesignConfig cfg = with_target(d, s);
  const TiteConfig& tc = *d.tite;
  TrialState st;
  st.grid = standardize_doses(s.raw_doses, d.scale);
  st.data = TrialData(st.grid.size());
  std::vector<PatientRecord> pts;
  std::vector<PathStep> path;
  const double interval = cfg.cohort_size / tc.accrual_rate;
  int cohort = 0;

  while (st.data.total() < cfg.max_n) {
    int size = std::min(cfg.cohort_size, cfg.max_n - st.data.total());
    double now = cohort * interval;
    double p = s.tox_at(st.grid.raw_doses[st.current]);
    int y = 0;
    for (int i = 0; i < size; ++i) {
      PatientRecord r;
      r.dose_index = st.current;
      r.enroll_time = now;
      r.dlt = rng.bernoulli(p);
      if (r.dlt) r.dlt_time = tc.tau * rng.uniform_pos();
      y += r.dlt;
      pts.push_back(r);
    }
    st.data.add(st.current, size, y);
    ++cohort;
    path.push_back({cohort, st.current, st.grid.raw_doses[st.current], size, y, ""});
    if (st.data.total() >= cfg.max_n) break;

    double next = cohort * interval;
    for (auto& r : pts) r.followup = std::min(tc.tau, next - r.enroll_time);
    DoseCounts eff = effective_dose_counts(pts, st.grid.size(), tc.tau);
    DecisionDetail det = evaluate_decision(cfg, st.grid, eff, st.data.n[st.current], st.current,
                                           st.eliminated_from);
    ActionKind a = det.action;
    if (det.eliminate) {
      st.eliminated_from = std::min(st.eliminated_from.value_or(st.grid.size()), st.current);
      if (a == ActionKind::terminate) {
        path.back().action = "terminate";
        return finish(st, cfg, true, std::move(path), {});
      }
    }
    if (a == ActionKind::escalate && !suspension_check(pts, st.current, tc.tau, tc.min_completed))
      a = ActionKind::stay;
    path.back().action = to_string(a);
    move_by(st, a);
  }
  // Every outcome is eventually ascertained; the last look uses complete data.
  DecisionDetail det = evaluate_decision(cfg, st);
  path.back().action = to_string(det.action);
  if (det.eliminate) {
    st.eliminated_from = std::min(st.eliminated_from.value_or(st.grid.size()), st.current);
    if (det.action == ActionKind::terminate) return finish(st, cfg, true, std::move(path), {});
  }
  return finish(st, cfg, false, std::move(path), {});
}

}  // namespace

TrialRecord run_trial(const SimDesign& d, const Scenario& s, Stream& rng) {
  check_compatible(d, s);
  if (d.tite) return run_tite(d, s, rng);
  return run_complete(d, s, rng);
}

std::vector<TrialRecord> run_records(const SimDesign& d, const Scenario& s, long replicates,
                                     std::uint64_t seed, int threads,
                                     std::atomic<long>* progress) {
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  d.validate();
  check_compatible(d, s);
  std::vector<TrialRecord> out(static_cast<std::size_t>(replicates));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long r; (r = next.fetch_add(1)) < replicates;) {
      Stream rng(seed, static_cast<std::uint64_t>(r));
      out[static_cast<std::size_t>(r)] = run_trial(d, s, rng);
      if (progress) progress->fetch_add(1);
    }
  };
  threads = std::max(1, std::min<int>(threads, static_cast<int>(replicates)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!err) err = std::current_exception();
          next.store(replicates);
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return out;
}

OCSummary oc_metrics(const std::vector<TrialRecord>& records, const Scenario& s,
                     const MetricOptions& opt, bool insertion_metrics) {
  if (records.empty()) throw InvalidArgument("no trial records");
  double mtd_raw;
  if (s.true_mtd_index) mtd_raw = s.raw_doses.at(*s.true_mtd_index);
  else if (s.true_mtd_dose) mtd_raw = *s.true_mtd_dose;
  else throw InvalidArgument("scenario has no true MTD");
  const bool on_grid = s.true_mtd_index.has_value();
  auto same = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); };

  const double R = static_cast<double>(records.size());
  const std::size_t m = s.raw_doses.size();
  OCSummary o;
  o.scenario = s.name;
  o.replicates = static_cast<long>(records.size());
  o.per_dose_selection.assign(m, 0.0);
  o.per_dose_allocation.assign(m, 0.0);
  double pcs = 0, pca = 0, above = 0, rod = 0, none = 0, mean_n = 0;
  double mod = 0, ins_sel = 0, ins_alloc = 0;
  std::vector<double> inserted_doses;

  for (const auto& r : records) {
    double n = r.realized_n;
    mean_n += n;
    double at = 0, hi = 0, at_ins = 0;
    for (std::size_t j = 0; j < r.raw_doses.size(); ++j) {
      double dj = r.raw_doses[j];
      double share = n > 0 ? r.allocations[j] / n : 0.0;
      if (on_grid && same(dj, mtd_raw)) at += share;
      if (dj > mtd_raw && !same(dj, mtd_raw)) hi += share;
      if (r.inserted_flags[j]) at_ins += share;
      for (std::size_t k = 0; k < m; ++k)
        if (!r.inserted_flags[j] && same(dj, s.raw_doses[k])) o.per_dose_allocation[k] += share;
    }
    pca += at;
    above += hi;
    ins_alloc += at_ins;
    bool over = opt.rod_inclusive ? hi >= opt.rod_threshold - 1e-12 : hi > opt.rod_threshold + 1e-12;
    rod += over;
    if (auto sel = r.selected_dose()) {
      if (on_grid && same(*sel, mtd_raw)) pcs += 1;
      if (r.inserted_flags[*r.selected_mtd]) ins_sel += 1;
      else
        for (std::size_t k = 0; k < m; ++k)
          if (same(*sel, s.raw_doses[k])) o.per_dose_selection[k] += 1;
    } else {
      none += 1;
    }
    if (!r.insertions.empty()) mod += 1;
    for (const auto& e : r.insertions) inserted_doses.push_back(e.raw_dose);
  }
  if (on_grid) {
    o.pcs = 100.0 * pcs / R;
    o.pca = 100.0 * pca / R;
  }
  o.above_mtd = 100.0 * above / R;
  o.rod = 100.0 * rod / R;
  o.no_selection = 100.0 * none / R;
  o.mean_n = mean_n / R;
  for (auto& v : o.per_dose_selection) v *= 100.0 / R;
  for (auto& v : o.per_dose_allocation) v *= 100.0 / R;
  if (insertion_metrics) {
    o.modification_rate = 100.0 * mod / R;
    o.inserted_selection = 100.0 * ins_sel / R;
    o.inserted_allocation = 100.0 * ins_alloc / R;
    if (!inserted_doses.empty()) {
      double mean = 0;
      for (double v : inserted_doses) mean += v;
      mean /= inserted_doses.size();
      o.inserted_mean = mean;
      if (inserted_doses.size() > 1) {
        double ss = 0;
        for (double v : inserted_doses) ss += (v - mean) * (v - mean);
        o.inserted_sd = std::sqrt(ss / (inserted_doses.size() - 1));
      }
    }
  }
  return o;
}

OCSummary run_trials(const SimDesign& d, const Scenario& s, long replicates, std::uint64_t seed,
                     int threads, std::atomic<long>* progress) {
  auto recs = run_records(d, s, replicates, seed, threads, progress);
  OCSummary o = oc_metrics(recs, s, d.metrics, d.insertion.has_value());
  o.design = d.name;
  o.seed = seed;
  return o;
}

}  // namespace skbd
