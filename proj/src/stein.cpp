#include "steinbound/stein.hpp"

#include <cmath>
#include <utility>

namespace steinbound {

namespace {

constexpr double kMaxSafeExponent = 700.0;

double ipow(double x, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

// z^deg - x^deg for x, z of the same sign, as (z - x) * sum z^i x^(deg-1-i);
// every summand has the same sign so there is no cancellation.
double power_gap(double z, double x, int deg) {
  double acc = 0.0;
  for (int i = 0; i < deg; ++i) acc += ipow(z, i) * ipow(x, deg - 1 - i);
  return (z - x) * acc;
}

// log P(Y > t) for t >= 0, finite even where the tail itself underflows.
double log_upper(const LimitLaw& law, double t) {
  return std::log(law.b()) + std::log(law.scaled_tail(t)) - law.a() * law.even_power(t);
}

}  // namespace

double psi(const LimitLaw& law, double x) noexcept {
  return 2.0 * law.k() * law.a() * ipow(x, 2 * law.k() - 1);
}

double psi_prime(const LimitLaw& law, double x) noexcept {
  const int k = law.k();
  return 2.0 * k * (2.0 * k - 1.0) * law.a() * ipow(x, 2 * k - 2);
}

SteinSolution::SteinSolution(LimitLaw law, double z)
    : law_(std::move(law)), z_(z), pz_(law_.cdf(z)), upper_pz_(law_.upper_tail(z)) {}

double SteinSolution::f(double x) const {
  const int deg = 2 * law_.k();
  const double a = law_.a();
  if (x < z_) {
    if (x <= 0.0) return upper_pz_ * law_.scaled_tail(-x);
    // 0 < x < z: (1 - P(z)) = b exp(-a z^2k) H(z), so the exponentials combine.
    return law_.scaled_tail(z_) * law_.cdf(x) * std::exp(-a * power_gap(z_, x, deg));
  }
  if (x >= 0.0) return pz_ * law_.scaled_tail(x);
  // z <= x < 0: P(z) = b exp(-a z^2k) H(-z).
  return law_.scaled_tail(-z_) * law_.cdf(-x) * std::exp(-a * power_gap(z_, x, deg));
}

double SteinSolution::log_f(double x) const {
  const int deg = 2 * law_.k();
  const double a = law_.a();
  if (x < z_) {
    if (x <= 0.0) {
      const double log_upper_pz = z_ > 0.0 ? log_upper(law_, z_) : std::log(upper_pz_);
      return log_upper_pz + std::log(law_.scaled_tail(-x));
    }
    return std::log(law_.scaled_tail(z_)) + std::log1p(-law_.upper_tail(x)) - a * power_gap(z_, x, deg);
  }
  if (x >= 0.0) {
    const double log_pz = z_ < 0.0 ? log_upper(law_, -z_) : std::log(pz_);
    return log_pz + std::log(law_.scaled_tail(x));
  }
  return std::log(law_.scaled_tail(-z_)) + std::log1p(-law_.upper_tail(-x)) - a * power_gap(z_, x, deg);
}

bool SteinSolution::scaled_factor(double x, double& out) const {
  const double exponent = law_.a() * law_.even_power(x);
  if (x < z_) {
    if (x <= 0.0) {
      out = law_.scaled_tail(-x);
      return true;
    }
    if (exponent > kMaxSafeExponent) return false;
    out = law_.cdf(x) * std::exp(exponent) / law_.b();
    return true;
  }
  if (x >= 0.0) {
    out = law_.scaled_tail(x);
    return true;
  }
  if (exponent > kMaxSafeExponent) return false;
  out = law_.cdf(-x) * std::exp(exponent) / law_.b();
  return true;
}

double SteinSolution::f_prime(double x) const {
  const double slope = psi(law_, x);
  double scaled = 0.0;
  if (x < z_) {
    if (scaled_factor(x, scaled)) return upper_pz_ * (1.0 + slope * scaled);
    return upper_pz_ + slope * f(x);
  }
  if (scaled_factor(x, scaled)) return pz_ * (slope * scaled - 1.0);
  return slope * f(x) - pz_;
}

double SteinSolution::g(double x) const {
  // Away from the origin both branches reduce to H(t) (psi'(t) + psi(t)^2) - psi(t)
  // with t = |x|, which cancels badly for large t; integrating by parts twice
  // turns it into psi'(t) * integral (1 - (t/u)^(2k)) exp(-a (u^(2k) - t^(2k))) du.
  if (x < z_ && x < 0.0) return upper_pz_ * psi_prime(law_, x) * law_.scaled_tail_gap(-x);
  if (x >= z_ && x > 0.0) return pz_ * psi_prime(law_, x) * law_.scaled_tail_gap(x);
  if (!(x < z_)) return g_product_rule(x);
  const int k = law_.k();
  const double a = law_.a();
  const double poly = (4.0 * k * k - 2.0 * k) * a * ipow(x, 2 * k - 2) +
                      4.0 * k * k * a * a * ipow(x, 4 * k - 2);
  const double slope = psi(law_, x);
  double scaled = 0.0;
  if (scaled_factor(x, scaled)) return upper_pz_ * (scaled * poly + slope);
  return f(x) * poly + upper_pz_ * slope;
}

double SteinSolution::g_product_rule(double x) const {
  return psi_prime(law_, x) * f(x) + psi(law_, x) * f_prime(x);
}

double SteinSolution::residual(double x) const {
  const double indicator = x <= z_ ? 1.0 : 0.0;
  return f_prime(x) - psi(law_, x) * f(x) - (indicator - pz_);
}

}  // namespace steinbound
