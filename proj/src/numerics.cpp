#include "skbd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skbd/errors.hpp"

namespace skbd {

namespace {

double lgamma_safe(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Modified Lentz evaluation of the continued fraction for I_x(a,b).
double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double eps = 1e-14;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double log_beta_fn(double a, double b) {
  return lgamma_safe(a) + lgamma_safe(b) - lgamma_safe(a + b);
}

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("reg_inc_beta: shape parameters must be positive");
  if (std::isnan(x) || x < 0.0 || x > 1.0)
    throw InvalidArgument("reg_inc_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double lfront = a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(lfront) * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(lfront) * beta_cf(1.0 - x, b, a) / b;
}

double reg_inc_beta(double x, const BetaParams& p) {
  return reg_inc_beta(x, p.alpha, p.beta);
}

double beta_interval_prob(const BetaParams& p, double lo, double hi) {
  if (lo > hi) throw InvalidArgument("beta_interval_prob: lo > hi");
  if (lo < 0.0 || hi > 1.0)
    throw InvalidArgument("beta_interval_prob: interval outside [0, 1]");
  if (lo == hi) return 0.0;
  double v = reg_inc_beta(hi, p.alpha, p.beta) - reg_inc_beta(lo, p.alpha, p.beta);
  return v < 0.0 ? 0.0 : v;
}

double beta_density(const BetaParams& p, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if ((x == 0.0 && p.alpha < 1.0) || (x == 1.0 && p.beta < 1.0))
    return std::numeric_limits<double>::infinity();
  if ((x == 0.0 && p.alpha > 1.0) || (x == 1.0 && p.beta > 1.0)) return 0.0;
  double l = -log_beta_fn(p.alpha, p.beta);
  if (x > 0.0) l += (p.alpha - 1.0) * std::log(x);
  if (x < 1.0) l += (p.beta - 1.0) * std::log1p(-x);
  return std::exp(l);
}

std::vector<double> pava(const std::vector<double>& values,
                         const std::vector<double>& weights,
                         Monotone direction) {
  const std::size_t n = values.size();
  if (weights.size() != n) throw InvalidArgument("pava: weights length mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidArgument("pava: weights must be positive");
  const double sgn = direction == Monotone::nondecreasing ? 1.0 : -1.0;

  struct Block {
    double mean, weight;
    std::size_t len;
  };
  std::vector<Block> st;
  st.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.push_back({sgn * values[i], weights[i], 1});
    while (st.size() > 1 && st[st.size() - 2].mean > st.back().mean) {
      Block top = st.back();
      st.pop_back();
      Block& prev = st.back();
      double w = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / w;
      prev.weight = w;
      prev.len += top.len;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (const auto& b : st) out.insert(out.end(), b.len, sgn * b.mean);
  return out;
}

std::vector<double> pava(const std::vector<double>& values, Monotone direction) {
  return pava(values, std::vector<double>(values.size(), 1.0), direction);
}

}  // namespace skbd
