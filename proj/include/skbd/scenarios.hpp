#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skbd/kernels.hpp"
#include "skbd/rng.hpp"

namespace skbd {

struct EmaxParams {
  double e0 = 0.0;
  double emax = 1.0;
  double ec50 = 1.0;
  double gamma = 1.0;
};

struct Scenario {
  std::string name;
  std::vector<double> raw_doses;
  std::vector<double> tox;
  double phi = 0.3;
  std::optional<std::size_t> true_mtd_index;
  std::optional<double> true_mtd_dose;
  std::optional<EmaxParams> emax;
  DoseScale scale = DoseScale::linear;

  // Truth at any dose: the Emax curve if known, else interpolation on the standardized scale.
  double tox_at(double raw) const;
  void validate() const;
};

double emax_value(const EmaxParams& p, double dose);
std::vector<double> emax_curve(const EmaxParams& p, const std::vector<double>& doses);
// Dose at which the curve reaches prob.
double emax_inverse(const EmaxParams& p, double prob);
EmaxParams fit_emax_two_point(double d1, double p1, double d2, double p2);
// Curve through (mtd, phi) with gamma minimizing the largest toxicity error.
EmaxParams fit_emax_anchored(const std::vector<double>& doses, const std::vector<double>& tox,
                             double mtd, double phi);

std::optional<std::size_t> mtd_index(const std::vector<double>& tox, double phi);

std::vector<Scenario> fixed_scenarios();
std::vector<Scenario> insertion_scenarios();

struct RandomConstraints {
  double eps1 = 0.05;
  double eps2 = 0.05;
  double tolerance = 0.05;
  double max_increment = 0.3;
  long max_attempts = 100000;
  long attempts_per_bound = 2000;
};

bool satisfies_constraints(const std::vector<double>& tox, std::size_t j, double phi,
                           const RandomConstraints& c);

Scenario random_scenario(int j_levels, double phi, const RandomConstraints& c, Stream& rng);

}  // namespace skbd
