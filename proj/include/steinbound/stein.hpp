#pragma once

// Solution of the Stein equation
//
//     f'(x) - psi(x) f(x) = 1(x <= z) - P(z),   psi(x) = 2 k a x^(2k-1),
//
// for the limit law P with density b exp(-a x^(2k)), together with its
// derivative and g_z = (psi f_z)'.
//
// Products like P(x) exp(a x^(2k)) overflow long before the solution itself
// does (k = 2, x = 40 already needs exp(1e9000 / 12)), so every such product is
// routed through LimitLaw::scaled_tail or combined in the exponent first.

#include "steinbound/limit_law.hpp"

namespace steinbound {

double psi(const LimitLaw& law, double x) noexcept;
double psi_prime(const LimitLaw& law, double x) noexcept;

class SteinSolution {
 public:
  SteinSolution(LimitLaw law, double z);

  const LimitLaw& law() const noexcept { return law_; }
  double z() const noexcept { return z_; }
  /// P(z)
  double pz() const noexcept { return pz_; }
  /// 1 - P(z), evaluated on the small side.
  double upper_pz() const noexcept { return upper_pz_; }

  double f(double x) const;
  /// log f(x). Stays finite where f itself underflows (k = 3 and |z| >= 5
  /// already push f below the smallest double on parts of [-10, 10]).
  double log_f(double x) const;

  /// Explicit derivative formula; at x == z the x >= z branch is used.
  double f_prime(double x) const;

  /// g_z(x). For x < z this is the closed form in terms of P(x); for x >= z
  /// it is psi'(x) f(x) + psi(x) f'(x). Where |x| is large both are evaluated
  /// through LimitLaw::scaled_tail_gap, since the direct forms cancel.
  double g(double x) const;

  /// psi'(x) f(x) + psi(x) f'(x) on either side of z. Loses relative
  /// precision far from the origin (the two products nearly cancel).
  double g_product_rule(double x) const;

  /// f'(x) - psi(x) f(x) - (1(x <= z) - P(z)); zero up to rounding.
  double residual(double x) const;

 private:
  // P(x) exp(a x^(2k)) / b for x < z, or (1 - P(x)) exp(a x^(2k)) / b for
  // x >= z, when it is representable; returns false otherwise.
  bool scaled_factor(double x, double& out) const;

  LimitLaw law_;
  double z_;
  double pz_;
  double upper_pz_;
};

}  // namespace steinbound
