#include "skbd/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skbd/errors.hpp"

namespace skbd {

double Scenario::tox_at(double raw) const {
  if (emax) return emax_value(*emax, raw);
  for (std::size_t i = 0; i < raw_doses.size(); ++i)
    if (std::fabs(raw_doses[i] - raw) <= 1e-12 * std::max(1.0, raw)) return tox[i];
  if (raw <= raw_doses.front()) return tox.front();
  if (raw >= raw_doses.back()) return tox.back();
  auto f = [this](double d) { return scale == DoseScale::log ? std::log(d) : d; };
  std::size_t k = std::upper_bound(raw_doses.begin(), raw_doses.end(), raw) - raw_doses.begin();
  double x0 = f(raw_doses[k - 1]), x1 = f(raw_doses[k]);
  double t = (f(raw) - x0) / (x1 - x0);
  return tox[k - 1] + t * (tox[k] - tox[k - 1]);
}

void Scenario::validate() const {
  if (raw_doses.size() < 2) throw MismatchError("scenario needs at least two doses");
  if (tox.size() != raw_doses.size())
    throw MismatchError("scenario tox and doses differ in length");
  for (std::size_t i = 0; i < tox.size(); ++i) {
    if (!(tox[i] >= 0.0 && tox[i] <= 1.0)) throw InvalidArgument("scenario tox outside [0, 1]");
    if (i > 0 && tox[i] < tox[i - 1]) throw InvalidArgument("scenario tox must be nondecreasing");
    if (i > 0 && !(raw_doses[i] > raw_doses[i - 1]))
      throw InvalidArgument("scenario doses must be strictly increasing");
  }
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidArgument("scenario phi must lie in (0, 1)");
  if (true_mtd_index && *true_mtd_index >= raw_doses.size())
    throw MismatchError("scenario MTD index out of range");
  if (!true_mtd_index && !true_mtd_dose) throw InvalidArgument("scenario has no true MTD");
}

double emax_value(const EmaxParams& p, double dose) {
  if (dose <= 0.0) return p.e0;
  // Logistic form in log dose avoids overflow of d^gamma.
  double z = p.gamma * (std::log(dose) - std::log(p.ec50));
  return p.e0 + p.emax / (1.0 + std::exp(-z));
}

std::vector<double> emax_curve(const EmaxParams& p, const std::vector<double>& doses) {
  std::vector<double> out;
  out.reserve(doses.size());
  for (double d : doses) out.push_back(emax_value(p, d));
  return out;
}

double emax_inverse(const EmaxParams& p, double prob) {
  double f = (prob - p.e0) / p.emax;
  if (!(f > 0.0 && f < 1.0)) throw InvalidArgument("probability outside the curve's range");
  return p.ec50 * std::pow(f / (1.0 - f), 1.0 / p.gamma);
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

double max_error(const EmaxParams& p, const std::vector<double>& doses,
                 const std::vector<double>& tox) {
  double e = 0.0;
  for (std::size_t i = 0; i < doses.size(); ++i)
    e = std::max(e, std::fabs(emax_value(p, doses[i]) - tox[i]));
  return e;
}

}  // namespace

EmaxParams fit_emax_two_point(double d1, double p1, double d2, double p2) {
  if (!(d1 > 0.0 && d2 > d1)) throw InvalidArgument("need 0 < d1 < d2");
  if (!(p1 > 0.0 && p2 > p1 && p2 < 1.0)) throw InvalidArgument("need 0 < p1 < p2 < 1");
  EmaxParams e;
  e.gamma = (logit(p2) - logit(p1)) / std::log(d2 / d1);
  e.ec50 = std::exp(std::log(d1) - logit(p1) / e.gamma);
  return e;
}

EmaxParams fit_emax_anchored(const std::vector<double>& doses, const std::vector<double>& tox,
                             double mtd, double phi) {
  auto make = [&](double g) {
    EmaxParams e;
    e.gamma = g;
    e.ec50 = mtd * std::pow((1.0 - phi) / phi, 1.0 / g);
    return e;
  };
  double best_g = 1.0, best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 10000; ++i) {
    double g = i * 1e-3;
    double err = max_error(make(g), doses, tox);
    if (err < best) best = err, best_g = g;
  }
  double lo = std::max(1e-3, best_g - 1e-3), hi = best_g + 1e-3;
  for (int it = 0; it < 100; ++it) {
    double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (max_error(make(a), doses, tox) <= max_error(make(b), doses, tox)) hi = b;
    else lo = a;
  }
  return make(0.5 * (lo + hi));
}

std::optional<std::size_t> mtd_index(const std::vector<double>& tox, double phi) {
  std::optional<std::size_t> best;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < tox.size(); ++j) {
    double g = std::fabs(tox[j] - phi);
    if (g < gap - 1e-12) gap = g, best = j;
  }
  return best;
}

std::vector<Scenario> fixed_scenarios() {
  static const double table[20][5] = {
      {0.20, 0.26, 0.40, 0.45, 0.46}, {0.20, 0.29, 0.35, 0.50, 0.58},
      {0.10, 0.20, 0.25, 0.35, 0.40}, {0.08, 0.20, 0.30, 0.45, 0.65},
      {0.04, 0.06, 0.20, 0.32, 0.50}, {0.01, 0.10, 0.20, 0.26, 0.35},
      {0.05, 0.06, 0.07, 0.20, 0.31}, {0.02, 0.04, 0.10, 0.20, 0.25},
      {0.01, 0.02, 0.07, 0.08, 0.20}, {0.01, 0.02, 0.03, 0.04, 0.20},
      {0.30, 0.36, 0.42, 0.45, 0.46}, {0.30, 0.40, 0.55, 0.60, 0.70},
      {0.08, 0.30, 0.38, 0.42, 0.52}, {0.13, 0.30, 0.42, 0.50, 0.80},
      {0.04, 0.07, 0.30, 0.35, 0.42}, {0.01, 0.12, 0.30, 0.41, 0.55},
      {0.06, 0.07, 0.12, 0.30, 0.40}, {0.02, 0.05, 0.16, 0.30, 0.36},
      {0.01, 0.02, 0.04, 0.06, 0.30}, {0.06, 0.07, 0.08, 0.12, 0.30}};
  std::vector<Scenario> out;
  for (int s = 0; s < 20; ++s) {
    Scenario sc;
    sc.name = "fixed" + std::to_string(s + 1);
    sc.raw_doses = {1, 2, 3, 4, 5};
    sc.tox.assign(table[s], table[s] + 5);
    sc.phi = s < 10 ? 0.2 : 0.3;
    sc.true_mtd_index = mtd_index(sc.tox, sc.phi);
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<Scenario> insertion_scenarios() {
  struct Row {
    double doses[5];
    double tox[5];
    double mtd;
  };
  static const Row rows[6] = {
      {{5, 15, 25, 35, 45}, {0.14, 0.45, 0.63, 0.74, 0.80}, 9.6},
      {{5, 10, 20, 35, 60}, {0.03, 0.14, 0.45, 0.75, 0.91}, 15.1},
      {{5, 7.5, 15, 30, 60}, {0.03, 0.06, 0.20, 0.50, 0.80}, 19.6},
      {{1, 1.5, 3, 5, 10}, {0.02, 0.03, 0.09, 0.20, 0.45}, 6.8},
      {{10, 20, 30, 40, 50}, {0.45, 0.55, 0.61, 0.65, 0.68}, 3.2},
      {{5, 10, 20, 35, 50}, {0.03, 0.05, 0.09, 0.15, 0.20}, 86.8}};
  const double phi = 0.3;
  std::vector<Scenario> out;
  for (int s = 0; s < 6; ++s) {
    const Row& r = rows[s];
    std::vector<double> d(r.doses, r.doses + 5), t(r.tox, r.tox + 5);
    EmaxParams e = fit_emax_two_point(d[0], t[0], d[1], t[1]);
    if (max_error(e, d, t) > 0.01 || std::fabs(emax_inverse(e, phi) - r.mtd) > 0.1)
      e = fit_emax_anchored(d, t, r.mtd, phi);
    Scenario sc;
    sc.name = "insertion" + std::to_string(s + 1);
    sc.raw_doses = d;
    sc.tox = t;
    sc.phi = phi;
    sc.emax = e;
    sc.true_mtd_dose = emax_inverse(e, phi);
    out.push_back(std::move(sc));
  }
  return out;
}

bool satisfies_constraints(const std::vector<double>& tox, std::size_t j, double phi,
                           const RandomConstraints& c) {
  const std::size_t J = tox.size();
  if (j >= J) return false;
  for (std::size_t i = 1; i < J; ++i)
    if (tox[i] < tox[i - 1]) return false;
  // Unique closest dose.
  double gap = std::fabs(tox[j] - phi);
  for (std::size_t i = 0; i < J; ++i)
    if (i != j && std::fabs(tox[i] - phi) <= gap) return false;
  if (gap > c.tolerance) return false;
  if (j > 0) {
    double inc = tox[j] - tox[j - 1];
    if (inc < c.eps1 || inc > c.max_increment) return false;
  }
  if (j + 1 < J) {
    double inc = tox[j + 1] - tox[j];
    if (inc < c.eps2 || inc > c.max_increment) return false;
  }
  return true;
}

Scenario random_scenario(int j_levels, double phi, const RandomConstraints& c, Stream& rng) {
  if (j_levels < 2) throw InvalidArgument("need at least two dose levels");
  if (!(phi > 0.0 && phi < 1.0)) throw InvalidArgument("phi must lie in (0, 1)");
  const int J = j_levels;
  const std::size_t j = rng.below(static_cast<std::uint64_t>(J));
  const double shape = std::max(static_cast<double>(J - static_cast<int>(j + 1)), 0.5);
  std::vector<double> tox(J);
  long attempts = 0;
  while (attempts < c.max_attempts) {
    // Beta(shape, 1) by inversion.
    double m = std::pow(rng.uniform_pos(), 1.0 / shape);
    double bound = phi + (1.0 - phi) * m;
    for (long k = 0; k < c.attempts_per_bound && attempts < c.max_attempts; ++k, ++attempts) {
      for (auto& t : tox) t = bound * rng.uniform();
      std::sort(tox.begin(), tox.end());
      if (!satisfies_constraints(tox, j, phi, c)) continue;
      Scenario sc;
      sc.name = "random";
      for (int i = 0; i < J; ++i) sc.raw_doses.push_back(i + 1);
      sc.tox = tox;
      sc.phi = phi;
      sc.true_mtd_index = j;
      return sc;
    }
  }
  throw Error("random_scenario: rejection budget exhausted");
}

}  // namespace skbd
