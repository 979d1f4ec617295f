#pragma once

#include <vector>

namespace skbd {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

double log_beta_fn(double a, double b);

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double x, double a, double b);
double reg_inc_beta(double x, const BetaParams& p);

// Posterior mass on (lo, hi].
double beta_interval_prob(const BetaParams& p, double lo, double hi);

double beta_density(const BetaParams& p, double x);

enum class Monotone { nondecreasing, nonincreasing };

// Weighted least-squares isotonic fit.
std::vector<double> pava(const std::vector<double>& values,
                         const std::vector<double>& weights,
                         Monotone direction = Monotone::nondecreasing);

std::vector<double> pava(const std::vector<double>& values,
                         Monotone direction = Monotone::nondecreasing);

}  // namespace skbd
