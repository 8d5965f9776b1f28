#pragma once

// The symmetric limit laws with density b * exp(-a * x^(2k)).
//
// k = 1, a = 1/2 is the standard normal; k = 2 gives the quartic laws that
// appear at criticality. All tail quantities are evaluated on the "small
// side": lower tails for z <= 0 and upper tails for z > 0 are each computed
// directly, never as one minus the other, so both keep full relative
// precision far out in the tail.

namespace steinbound {

class LimitLaw {
 public:
  /// Builds the law and its normalizing constant. b is computed in closed
  /// form, k a^(1/(2k)) / Gamma(1/(2k)), and cross-checked against adaptive
  /// quadrature; disagreement beyond 1e-10 relative throws
  /// NumericConsistencyError. Throws InvalidParameter for k < 1 or a not
  /// positive and finite.
  LimitLaw(int k, double a);

  int k() const noexcept { return k_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// x^(2k), computed from x*x so it is exactly even in x.
  double even_power(double x) const noexcept;

  double density(double x) const noexcept;

  /// P(Y <= z). Accepts +-infinity.
  double cdf(double z) const;

  /// P(Y > z), computed directly (small side) for z > 0.
  double upper_tail(double z) const;

  /// H(x) = integral over [x, inf) of exp(-a (u^(2k) - x^(2k))) du for x >= 0.
  /// Equals exp(a x^(2k)) * P(Y > x) / b but never forms the exponential.
  /// H(0) = 1 / (2b). Throws DomainError for x < 0.
  double scaled_tail(double x) const;

  /// integral over [x, inf) of (1 - (x/u)^(2k)) exp(-a (u^(2k) - x^(2k))) du,
  /// for x >= 0. Equals H(x) - x^(2k) times the same integral with weight
  /// u^(-2k), but is summed from a nonnegative integrand.
  double scaled_tail_gap(double x) const;

  /// min(1/2, b / (2 k a x^(2k-1))) * exp(-a x^(2k)), an upper bound on
  /// P(Y > x). Throws DomainError for x <= 0.
  double tail_bound(double x) const;

  /// E|Y|^m from the Gamma-function closed form, cross-checked by quadrature
  /// to 1e-9 relative (NumericConsistencyError otherwise). Throws DomainError
  /// for m < 0.
  double abs_moment(double m) const;

  /// z with |cdf(z) - q| <= 1e-12, by bracketing bisection. Throws
  /// DomainError unless 0 < q < 1.
  double quantile(double q) const;

 private:
  double normalizer_by_quadrature() const;
  double moment_by_quadrature(double m) const;

  int k_;
  double a_;
  double b_;
};

}  // namespace steinbound
