#pragma once

// Imitative monomer-dimer model on the complete graph K_n, through its
// weighted Curie-Weiss reformulation: sigma in {0,1}^n marks the monomers,
// D(sigma) counts the dimer configurations with exactly that monomer set, and
//
//     -H(sigma) = n (J m^2 + (log(n)/2 + h - J) m),   m = sum sigma_i / n.
//
// The pair dynamics resamples two uniformly chosen vertices {u, v} from the
// Gibbs conditional law given all other sites.

#include <array>

#include "steinbound/discrete_law.hpp"
#include "steinbound/limit_law.hpp"

namespace steinbound::monomer_dimer {

inline constexpr long kMaxVertices = 1'000'000;

double g_fn(double x);
double tau_fn(double x, double J, double h);

/// -J x^2 - (1 - g(tau(x)) + log(1 - g(tau(x)))) / 2. Throws DomainError if
/// 1 - g(tau(x)) is not positive.
double p_tilde(double x, double J, double h);

struct CriticalPoint {
  double J_c = 0.0;
  double h_c = 0.0;
  double m_c = 0.0;
  double tau_c = 0.0;     // tau(m_c) at (J_c, h_c)
  double lambda_c = 0.0;  // -p_tilde''''(m_c)
  std::array<double, 3> fourth_derivative_estimates{};  // Richardson levels
  std::array<double, 3> low_derivatives{};              // p_tilde', '', ''' at m_c
};

/// Closed-form J_c, h_c, m_c and the finite-difference lambda_c. Throws
/// NumericConsistencyError if the Richardson estimates of the fourth
/// derivative disagree by more than 1e-4 relative. Computed once.
const CriticalPoint& critical_constants();

/// Richardson-extrapolated central differences of p_tilde at (J_c, h_c):
/// level 0 uses steps (h, h/2), level 1 uses (h/2, h/4), level 2 combines both.
std::array<double, 3> p_tilde_derivative(int order, double x, double first_step);

/// log((v-1)!!), the number of perfect matchings of K_v; -inf for odd v and
/// 0 for v = 0.
double matching_count_log(long v);

/// Law of the monomer count t over {t : n - t even}. Throws InvalidParameter
/// for n < 2 and ResourceError above kMaxVertices.
DiscreteLaw magnetization_law(long n, double J, double h);

/// Law of W = n^(1/4) (t/n - m_c) at (J_c, h_c).
DiscreteLaw w_law(long n);

/// Limit of W: density proportional to exp(-lambda_c x^4 / 24).
LimitLaw critical_limit_law();

/// 2(1-m_c)(m_c^2 + (1-m_c) e^{2 tau_c}) / (((1-m_c) + e^{2 tau_c}) n^{3/2})
double lambda(long n);

/// Pair statistics per atom of W at (J_c, h_c); psi(w) = lambda_c w^3 / 6.
PairDiagnostics pair_diagnostics(long n);

TransitionKernel transition_kernel(long n, double J, double h);

/// sup over atoms of |R| n^(7/4) / (|w|^4 + 1)
double remainder_constant(const PairDiagnostics& diag, long n);

/// sup over atoms of |E(Delta^2|w) / (2 lambda) - 1| n^(1/4) / (|w| + 1)
double verify_cond_var_scaling(const PairDiagnostics& diag, long n);
double verify_cond_var_scaling(long n);

/// P(|W| > delta n^(1/4))
double tail_concentration(long n, double delta);

}  // namespace steinbound::monomer_dimer
