#pragma once

// Exact finite-n law of the Curie-Weiss magnetization S_n = sum sigma_i and
// the exchangeable pair built from one Glauber (heat-bath) update at a
// uniformly chosen site.
//
// Everything is aggregated over the two site classes (positive / negative
// spins), which makes the diagnostics exact and O(n).

#include "steinbound/discrete_law.hpp"
#include "steinbound/limit_law.hpp"

namespace steinbound::curie_weiss {

inline constexpr long kMaxSpins = 10'000'000;

/// Law of S_n over {-n, -n+2, ..., n}. Throws InvalidParameter for n < 1 or
/// beta <= 0 and ResourceError for n > kMaxSpins.
DiscreteLaw magnetization_law(long n, double beta = 1.0);

/// Law of W = S_n / n^(3/4).
DiscreteLaw w_law(long n, double beta = 1.0);

/// Limit of W at beta = 1: density proportional to exp(-x^4 / 12).
LimitLaw critical_limit_law();

/// Conditional pair statistics per atom of W. lambda = n^(-3/2) and
/// psi(w) = w^3 / 3 are the critical (beta = 1) choices; the conditional
/// moments are exact for any beta.
PairDiagnostics pair_diagnostics(long n, double beta = 1.0);

/// Magnetization-level kernel of the single-site update.
TransitionKernel transition_kernel(long n, double beta = 1.0);

struct BoundCheck {
  double max_violation = 0.0;       // max over atoms of lhs - rhs (<= 0 when the bound holds)
  double empirical_constant = 0.0;  // max over atoms of lhs / rhs
};

/// |R| <= 2|w|^5 / (15 n^2) + |w| / n^2 + n^(-11/4) at every atom.
BoundCheck verify_remainder_bound(const PairDiagnostics& diag, long n);
BoundCheck verify_remainder_bound(long n);

/// |2 n^(-3/2) - E(Delta^2 | w)| <= 2 n^(-5/2) + 2 n^(-2) w^2 at every atom.
BoundCheck verify_cond_var_bound(const PairDiagnostics& diag, long n);
BoundCheck verify_cond_var_bound(long n);

/// E|W|^(2p) at beta = 1.
double moment(long n, double p);

/// 20^(p/2) p^(p/2)
double moment_bound(double p);

/// E(Delta^2 1(|Delta| <= a_tr) 1(z - a_tr <= W <= z + a_tr)) at beta = 1.
double concentration_lhs(const PairDiagnostics& diag, double z, double a_tr);
double concentration_lhs(long n, double z, double a_tr);

}  // namespace steinbound::curie_weiss
