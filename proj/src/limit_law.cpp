#include "steinbound/limit_law.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "steinbound/errors.hpp"
#include "steinbound/quadrature.hpp"

namespace steinbound {

namespace {

constexpr double kLogMinDouble = -745.2;  // exp() is exactly 0 below this

double binomial(int n, int j) {
  double c = 1.0;
  for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
  return c;
}

// a * ((x + s)^(2k) - x^(2k)) for x, s >= 0 via the binomial expansion in s,
// which has only nonnegative terms and so no cancellation.
class TailExponent {
 public:
  TailExponent(int k, double a, double x) : a_(a), coef_(2 * k) {
    const int deg = 2 * k;
    for (int j = 1; j <= deg; ++j) coef_[j - 1] = binomial(deg, j) * std::pow(x, deg - j);
    x_ = x;
    deg_ = deg;
  }

  double operator()(double s) const {
    double acc = 0.0;
    for (int j = deg_; j >= 1; --j) acc = acc * s + coef_[j - 1];
    return a_ * acc * s;
  }

  double derivative(double s) const { return a_ * deg_ * std::pow(x_ + s, deg_ - 1); }

  double slope_at_zero() const { return a_ * coef_[0]; }

 private:
  double a_;
  std::vector<double> coef_;
  double x_ = 0.0;
  int deg_ = 2;
};

}  // namespace

LimitLaw::LimitLaw(int k, double a) : k_(k), a_(a), b_(0.0) {
  if (k < 1) throw InvalidParameter("LimitLaw: k must be >= 1, got " + std::to_string(k));
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidParameter("LimitLaw: a must be positive and finite, got " + std::to_string(a));
  }
  const double inv = 1.0 / (2.0 * k);
  b_ = std::exp(std::log(static_cast<double>(k)) + inv * std::log(a) - std::lgamma(inv));
  const double b_quad = normalizer_by_quadrature();
  if (std::abs(b_quad - b_) > 1e-10 * b_) {
    throw NumericConsistencyError("LimitLaw: quadrature normalizer " + std::to_string(b_quad) +
                                  " disagrees with closed form " + std::to_string(b_));
  }
}

double LimitLaw::even_power(double x) const noexcept {
  const double x2 = x * x;
  double out = x2;
  for (int i = 1; i < k_; ++i) out *= x2;
  return out;
}

double LimitLaw::density(double x) const noexcept {
  const double e = a_ * even_power(x);
  return e > -kLogMinDouble ? 0.0 : b_ * std::exp(-e);
}

double LimitLaw::normalizer_by_quadrature() const {
  // 2 * integral over [0, X] of exp(-a x^(2k)); beyond X the integrand is
  // below the smallest double.
  const double scale = std::pow(a_, -1.0 / (2.0 * k_));
  const double upper = std::pow(-kLogMinDouble / a_, 1.0 / (2.0 * k_));
  auto f = [this](double x) { return std::exp(-a_ * even_power(x)); };
  quadrature::Tolerance tol;
  tol.abs = 1e-15 * scale;
  tol.rel = 1e-13;
  double total = quadrature::integrate(f, 0.0, std::min(scale, upper), tol).value;
  double lo = scale;
  while (lo < upper) {
    const double hi = std::min(2.0 * lo, upper);
    total += quadrature::integrate(f, lo, hi, tol).value;
    lo = hi;
  }
  return 1.0 / (2.0 * total);
}

namespace {

// integral over s >= 0 of weight(s) exp(-E(s)), in geometrically growing
// panels until the remaining mass is negligible. weight must be in [0, 1].
template <class Weight>
double tail_integral(const TailExponent& exponent, double width, Weight weight) {
  // Characteristic decay length: where the exponent first reaches ~1.
  const double slope = exponent.slope_at_zero();
  const double length = slope > 0.0 ? std::min(1.0 / slope, width) : width;

  auto f = [&](double s) { return weight(s) * std::exp(-exponent(s)); };
  quadrature::Tolerance tol;
  tol.abs = 1e-17 * length;
  tol.rel = 1e-13;

  double total = 0.0;
  double lo = 0.0;
  double hi = length;
  for (int panel = 0; panel < 200; ++panel) {
    total += quadrature::integrate(f, lo, hi, tol).value;
    const double e = exponent(hi);
    if (e > -kLogMinDouble) break;
    // Remaining mass is at most exp(-E(hi)) / E'(hi) for convex E.
    const double remainder = std::exp(-e) / exponent.derivative(hi);
    if (remainder < 1e-17 * total) break;
    lo = hi;
    hi = 2.0 * lo + length;
  }
  return total;
}

}  // namespace

double LimitLaw::scaled_tail(double x) const {
  if (!(x >= 0.0)) throw DomainError("scaled_tail: x must be >= 0");
  const TailExponent exponent(k_, a_, x);
  return tail_integral(exponent, std::pow(a_, -1.0 / (2.0 * k_)), [](double) { return 1.0; });
}

double LimitLaw::scaled_tail_gap(double x) const {
  if (!(x >= 0.0)) throw DomainError("scaled_tail_gap: x must be >= 0");
  const TailExponent exponent(k_, a_, x);
  // 1 - (x/u)^(2k) = (u^(2k) - x^(2k)) / u^(2k), and the numerator is E(s) / a.
  return tail_integral(exponent, std::pow(a_, -1.0 / (2.0 * k_)), [&](double s) {
    const double u = x + s;
    return u > 0.0 ? exponent(s) / (a_ * even_power(u)) : 0.0;
  });
}

double LimitLaw::upper_tail(double z) const {
  if (std::isnan(z)) return z;
  if (z == std::numeric_limits<double>::infinity()) return 0.0;
  if (z == -std::numeric_limits<double>::infinity()) return 1.0;
  if (z == 0.0) return 0.5;
  if (z < 0.0) return 1.0 - upper_tail(-z);
  const double e = a_ * even_power(z);
  if (e > -kLogMinDouble + 50.0) return 0.0;
  return std::exp(std::log(b_ * scaled_tail(z)) - e);
}

double LimitLaw::cdf(double z) const {
  if (std::isnan(z)) return z;
  if (z > 0.0) return 1.0 - upper_tail(z);
  return upper_tail(-z);
}

double LimitLaw::tail_bound(double x) const {
  if (!(x > 0.0)) throw DomainError("tail_bound: x must be > 0");
  const double mills = b_ / (2.0 * k_ * a_ * std::pow(x, 2 * k_ - 1));
  return std::min(0.5, mills) * std::exp(-a_ * even_power(x));
}

double LimitLaw::moment_by_quadrature(double m) const {
  const double deg = 2.0 * k_;
  auto log_integrand = [&](double x) { return m * std::log(x) - a_ * std::pow(x, deg); };
  const double peak = m > 0.0 ? std::pow(m / (deg * a_), 1.0 / deg) : 0.0;
  const double width = std::pow(a_, -1.0 / deg);
  const double log_peak = m > 0.0 ? log_integrand(peak) : 0.0;
  double upper = std::max(peak, width);
  while (log_integrand(upper) > log_peak - 80.0) upper *= 1.5;

  auto f = [&](double x) { return x > 0.0 ? std::exp(log_integrand(x)) : (m == 0.0 ? 1.0 : 0.0); };
  quadrature::Tolerance tol;
  tol.abs = 1e-16 * std::exp(log_peak) * width;
  tol.rel = 1e-13;
  double total = 0.0;
  if (peak > 0.0) total += quadrature::integrate(f, 0.0, peak, tol).value;
  total += quadrature::integrate(f, peak, upper, tol).value;
  return 2.0 * b_ * total;
}

double LimitLaw::abs_moment(double m) const {
  if (!(m >= 0.0)) throw DomainError("abs_moment: m must be >= 0");
  const double inv = 1.0 / (2.0 * k_);
  const double closed =
      std::exp(-m * inv * std::log(a_) + std::lgamma((m + 1.0) * inv) - std::lgamma(inv));
  const double quad = moment_by_quadrature(m);
  if (std::abs(quad - closed) > 1e-9 * closed) {
    throw NumericConsistencyError("abs_moment: quadrature " + std::to_string(quad) +
                                  " disagrees with closed form " + std::to_string(closed));
  }
  return closed;
}

double LimitLaw::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile: q must lie in (0, 1)");
  if (q == 0.5) return 0.0;
  // Solve upper_tail(x) = p on x > 0 with p = min(q, 1 - q); 1 - q is exact
  // for q in [1/2, 1).
  const double p = q < 0.5 ? q : 1.0 - q;
  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi) > p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    if (upper_tail(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = std::abs(upper_tail(lo) - p) <= std::abs(upper_tail(hi) - p) ? lo : hi;
  return q < 0.5 ? -x : x;
}

}  // namespace steinbound
