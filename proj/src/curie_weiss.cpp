#include "steinbound/curie_weiss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "steinbound/errors.hpp"
#include "steinbound/kernels.hpp"

namespace steinbound::curie_weiss {

namespace {

void validate(long n, double beta) {
  if (n < 1) throw InvalidParameter("curie_weiss: n must be >= 1, got " + std::to_string(n));
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidParameter("curie_weiss: beta must be positive and finite");
  }
  if (n > kMaxSpins) {
    throw ResourceError("curie_weiss: n = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(kMaxSpins));
  }
}

// Heat-bath flip probabilities for a site of each sign in a state with total
// spin s: a + site flips with probability (1 - tanh(beta (s-1)/n)) / 2, a -
// site with (1 + tanh(beta (s+1)/n)) / 2.
struct FlipRates {
  double plus;
  double minus;
};

FlipRates flip_rates(long n, long s, double beta) {
  const double dn = static_cast<double>(n);
  return {0.5 * (1.0 - std::tanh(beta * static_cast<double>(s - 1) / dn)),
          0.5 * (1.0 + std::tanh(beta * static_cast<double>(s + 1) / dn))};
}

}  // namespace

DiscreteLaw magnetization_law(long n, double beta) {
  validate(n, beta);
  const double dn = static_cast<double>(n);
  const double log_n_fact = std::lgamma(dn + 1.0);
  std::vector<double> locations(static_cast<std::size_t>(n) + 1);
  std::vector<double> log_weights(locations.size());
  for (long j = 0; j <= n; ++j) {
    const long s = 2 * j - n;
    const double ds = static_cast<double>(s);
    locations[j] = ds;
    // sum_{i<j} sigma_i sigma_j = (S^2 - n) / 2
    log_weights[j] = log_n_fact - std::lgamma(static_cast<double>(j) + 1.0) -
                     std::lgamma(static_cast<double>(n - j) + 1.0) + beta * (ds * ds - dn) / (2.0 * dn);
  }
  return DiscreteLaw::from_log_weights(std::move(locations), std::move(log_weights));
}

DiscreteLaw w_law(long n, double beta) {
  return magnetization_law(n, beta).affine(std::pow(static_cast<double>(n), -0.75), 0.0);
}

LimitLaw critical_limit_law() { return LimitLaw(2, 1.0 / 12.0); }

PairDiagnostics pair_diagnostics(long n, double beta) {
  const DiscreteLaw law = magnetization_law(n, beta);
  const double dn = static_cast<double>(n);
  const double scale = std::pow(dn, -0.75);
  const double jump = 2.0 * scale;

  PairDiagnostics diag;
  diag.lambda = std::pow(dn, -1.5);
  diag.delta_support_bound = jump;
  diag.resize(law.size());
  for (long j = 0; j <= n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const long s = 2 * j - n;
    const double frac_plus = static_cast<double>(j) / dn;
    const double frac_minus = static_cast<double>(n - j) / dn;
    const FlipRates r = flip_rates(n, s, beta);
    const double up = frac_minus * r.minus;   // a - site turns +: W rises, Delta = -jump
    const double down = frac_plus * r.plus;   // a + site turns -: W falls, Delta = +jump
    const double w = static_cast<double>(s) * scale;
    diag.w[i] = w;
    diag.prob[i] = law.probs()[i];
    diag.log_prob[i] = law.log_probs()[i];
    // E(Delta | s) = n^(-7/4) sum_i (sigma_i - tanh(beta (s - sigma_i) / n))
    const double drift = static_cast<double>(s) -
                         static_cast<double>(j) * std::tanh(beta * static_cast<double>(s - 1) / dn) -
                         static_cast<double>(n - j) * std::tanh(beta * static_cast<double>(s + 1) / dn);
    diag.e_delta[i] = drift * scale / dn;
    const double moving = up + down;
    diag.e_delta2[i] = jump * jump * moving;
    diag.e_delta4[i] = jump * jump * jump * jump * moving;
    diag.psi_w[i] = w * w * w / 3.0;
    diag.remainder[i] = diag.lambda * diag.psi_w[i] - diag.e_delta[i];
  }
  return diag;
}

TransitionKernel transition_kernel(long n, double beta) {
  validate(n, beta);
  const double dn = static_cast<double>(n);
  TransitionKernel kernel;
  kernel.up.resize(static_cast<std::size_t>(n) + 1);
  kernel.down.resize(kernel.up.size());
  for (long j = 0; j <= n; ++j) {
    const FlipRates r = flip_rates(n, 2 * j - n, beta);
    kernel.up[j] = static_cast<double>(n - j) / dn * r.minus;
    kernel.down[j] = static_cast<double>(j) / dn * r.plus;
  }
  return kernel;
}

BoundCheck verify_remainder_bound(const PairDiagnostics& diag, long n) {
  const double dn = static_cast<double>(n);
  BoundCheck out{-INFINITY, 0.0};
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double aw = std::abs(diag.w[i]);
    const double rhs = 2.0 * std::pow(aw, 5) / (15.0 * dn * dn) + aw / (dn * dn) + std::pow(dn, -2.75);
    const double lhs = std::abs(diag.remainder[i]);
    out.max_violation = std::max(out.max_violation, lhs - rhs);
    out.empirical_constant = std::max(out.empirical_constant, lhs / rhs);
  }
  return out;
}

BoundCheck verify_remainder_bound(long n) { return verify_remainder_bound(pair_diagnostics(n), n); }

BoundCheck verify_cond_var_bound(const PairDiagnostics& diag, long n) {
  const double dn = static_cast<double>(n);
  BoundCheck out{-INFINITY, 0.0};
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double w = diag.w[i];
    const double rhs = 2.0 * std::pow(dn, -2.5) + 2.0 * w * w / (dn * dn);
    const double lhs = std::abs(2.0 * std::pow(dn, -1.5) - diag.e_delta2[i]);
    out.max_violation = std::max(out.max_violation, lhs - rhs);
    out.empirical_constant = std::max(out.empirical_constant, lhs / rhs);
  }
  return out;
}

BoundCheck verify_cond_var_bound(long n) { return verify_cond_var_bound(pair_diagnostics(n), n); }

double moment(long n, double p) {
  if (!(p >= 0.0)) throw DomainError("moment: p must be >= 0");
  return w_law(n).abs_moment(2.0 * p);
}

double moment_bound(double p) { return std::pow(20.0, p / 2.0) * std::pow(p, p / 2.0); }

double concentration_lhs(const PairDiagnostics& diag, double z, double a_tr) {
  if (!(a_tr > 0.0)) throw InvalidParameter("concentration_lhs: a_tr must be positive");
  // Nonnegative summands: accumulate in log space so far-tail windows keep
  // their relative precision.
  std::vector<double> terms;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag.w[i] < z - a_tr || diag.w[i] > z + a_tr) continue;
    const double inner = diag.e_delta2_within(i, a_tr);
    if (inner > 0.0) terms.push_back(diag.log_prob[i] + std::log(inner));
  }
  if (terms.empty()) return 0.0;
  return std::exp(kernels::log_sum_exp(terms));
}

double concentration_lhs(long n, double z, double a_tr) {
  return concentration_lhs(pair_diagnostics(n), z, a_tr);
}

}  // namespace steinbound::curie_weiss
