#include "steinbound/monomer_dimer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "steinbound/errors.hpp"
#include "steinbound/kernels.hpp"

namespace steinbound::monomer_dimer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 1 - g(x) without cancellation: for x >= 0 it equals
// 4 e^{-2x} / (1 + sqrt(1 + 4 e^{-2x}))^2.
double one_minus_g(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-2.0 * x);
    const double root = std::sqrt(1.0 + 4.0 * e);
    return 4.0 * e / ((1.0 + root) * (1.0 + root));
  }
  const double e = std::exp(x);
  const double root = std::sqrt(e * e + 4.0);
  return (root - e) / (root + e);
}

void validate(long n) {
  if (n < 2) throw InvalidParameter("monomer_dimer: n must be >= 2, got " + std::to_string(n));
  if (n > kMaxVertices) {
    throw ResourceError("monomer_dimer: n = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(kMaxVertices));
  }
}

// Configuration-level log weight log D + (-H) for c monomers.
double log_config_weight(long n, long c, double J, double h) {
  const double dn = static_cast<double>(n);
  const double m = static_cast<double>(c) / dn;
  return matching_count_log(n - c) + dn * (J * m * m + (0.5 * std::log(dn) + h - J) * m);
}

// log_config_weight(c + 2) - log_config_weight(c) in closed form:
// (v-3)!! / (v-1)!! = 1 / (v-1) with v = n - c, and the Hamiltonian
// difference is J (4c + 4) / n + log n + 2h - 2J.
double log_config_gap(long n, long c, double J, double h) {
  const double dn = static_cast<double>(n);
  return -std::log(static_cast<double>(n - c - 1)) + J * (4.0 * static_cast<double>(c) + 4.0) / dn +
         std::log(dn) + 2.0 * h - 2.0 * J;
}

// Conditional law of the new pair sum k' in {0, 1, 2} given the other n - 2
// sites hold r monomers. Outcome k' has multiplicity (1, 2, 1) and weight
// D(r + k') exp(-H(r + k')); parity leaves either {0, 2} or {1}.
std::array<double, 3> resample_law(long n, long r, double J, double h) {
  if ((n - r) % 2 != 0) return {0.0, 1.0, 0.0};
  const double gap = log_config_gap(n, r, J, h);
  // Shared max subtraction over the two live outcomes.
  const double top = std::max(0.0, gap);
  const double w0 = std::exp(-top);
  const double w2 = std::exp(gap - top);
  const double total = w0 + w2;
  return {w0 / total, 0.0, w2 / total};
}

struct PairClasses {
  double both_monomer;  // k = 2
  double mixed;         // k = 1
  double both_dimer;    // k = 0
};

PairClasses pair_classes(long n, long t) {
  const double dn = static_cast<double>(n);
  const double dt = static_cast<double>(t);
  const double pairs = dn * (dn - 1.0);
  return {dt * (dt - 1.0) / pairs, 2.0 * dt * (dn - dt) / pairs, (dn - dt) * (dn - dt - 1.0) / pairs};
}

std::array<double, 3> fd_stencil(int order, double x, double step, double J, double h) {
  auto f = [&](double u) { return p_tilde(u, J, h); };
  double value = 0.0;
  switch (order) {
    case 1:
      value = (f(x + step) - f(x - step)) / (2.0 * step);
      break;
    case 2:
      value = (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
      break;
    case 3:
      value = (f(x + 2.0 * step) - 2.0 * f(x + step) + 2.0 * f(x - step) - f(x - 2.0 * step)) /
              (2.0 * step * step * step);
      break;
    case 4:
      value = (f(x + 2.0 * step) - 4.0 * f(x + step) + 6.0 * f(x) - 4.0 * f(x - step) +
               f(x - 2.0 * step)) /
              (step * step * step * step);
      break;
    default:
      throw InvalidParameter("p_tilde_derivative: order must be 1..4");
  }
  return {value, 0.0, 0.0};
}

CriticalPoint compute_critical_point() {
  CriticalPoint cp;
  const double root2 = std::sqrt(2.0);
  cp.J_c = 1.0 / (4.0 * (3.0 - 2.0 * root2));
  cp.h_c = (std::log(12.0 - 8.0 * root2) - 1.0) / 4.0;
  cp.m_c = 2.0 - root2;
  cp.tau_c = tau_fn(cp.m_c, cp.J_c, cp.h_c);
  cp.fourth_derivative_estimates = p_tilde_derivative(4, cp.m_c, 1e-2);
  for (int order = 1; order <= 3; ++order) {
    cp.low_derivatives[order - 1] = p_tilde_derivative(order, cp.m_c, 1e-2)[2];
  }
  const auto& est = cp.fourth_derivative_estimates;
  const double best = est[2];
  double spread = 0.0;
  for (double e : est) spread = std::max(spread, std::abs(e - best));
  if (!(best < 0.0) || spread > 1e-4 * std::abs(best)) {
    throw NumericConsistencyError("critical_constants: Richardson estimates of p_tilde'''' disagree (" +
                                  std::to_string(est[0]) + ", " + std::to_string(est[1]) + ", " +
                                  std::to_string(est[2]) + ")");
  }
  cp.lambda_c = -best;
  return cp;
}

}  // namespace

double g_fn(double x) {
  if (x >= 0.0) return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * std::exp(-2.0 * x)));
  const double e = std::exp(x);
  return 2.0 * e / (e + std::sqrt(e * e + 4.0));
}

double tau_fn(double x, double J, double h) { return (2.0 * x - 1.0) * J + h; }

double p_tilde(double x, double J, double h) {
  const double rest = one_minus_g(tau_fn(x, J, h));
  if (!(rest > 0.0)) throw DomainError("p_tilde: 1 - g(tau(x)) is not positive");
  return -J * x * x - 0.5 * (rest + std::log(rest));
}

std::array<double, 3> p_tilde_derivative(int order, double x, double first_step) {
  const double root2 = std::sqrt(2.0);
  const double J = 1.0 / (4.0 * (3.0 - 2.0 * root2));
  const double h = (std::log(12.0 - 8.0 * root2) - 1.0) / 4.0;
  const double d1 = fd_stencil(order, x, first_step, J, h)[0];
  const double d2 = fd_stencil(order, x, first_step / 2.0, J, h)[0];
  const double d3 = fd_stencil(order, x, first_step / 4.0, J, h)[0];
  // Central stencils have O(step^2) leading error.
  const double r0 = (4.0 * d2 - d1) / 3.0;
  const double r1 = (4.0 * d3 - d2) / 3.0;
  return {r0, r1, (16.0 * r1 - r0) / 15.0};
}

const CriticalPoint& critical_constants() {
  static const CriticalPoint cp = compute_critical_point();
  return cp;
}

double matching_count_log(long v) {
  if (v < 0) throw InvalidParameter("matching_count_log: v must be >= 0");
  if (v % 2 != 0) return kNegInf;
  if (v == 0) return 0.0;
  const double dv = static_cast<double>(v);
  return std::lgamma(dv + 1.0) - 0.5 * dv * std::log(2.0) - std::lgamma(0.5 * dv + 1.0);
}

DiscreteLaw magnetization_law(long n, double J, double h) {
  validate(n);
  const double dn = static_cast<double>(n);
  const double log_n_fact = std::lgamma(dn + 1.0);
  std::vector<double> locations;
  std::vector<double> log_weights;
  locations.reserve(static_cast<std::size_t>(n / 2 + 1));
  log_weights.reserve(locations.capacity());
  for (long t = n % 2; t <= n; t += 2) {
    const double dt = static_cast<double>(t);
    locations.push_back(dt);
    log_weights.push_back(log_n_fact - std::lgamma(dt + 1.0) - std::lgamma(dn - dt + 1.0) +
                          log_config_weight(n, t, J, h));
  }
  return DiscreteLaw::from_log_weights(std::move(locations), std::move(log_weights));
}

DiscreteLaw w_law(long n) {
  const CriticalPoint& cp = critical_constants();
  const double root = std::pow(static_cast<double>(n), 0.25);
  return magnetization_law(n, cp.J_c, cp.h_c).affine(root / static_cast<double>(n), -root * cp.m_c);
}

LimitLaw critical_limit_law() { return LimitLaw(2, critical_constants().lambda_c / 24.0); }

double lambda(long n) {
  if (n < 1) throw InvalidParameter("monomer_dimer::lambda: n must be >= 1");
  const CriticalPoint& cp = critical_constants();
  const double e = std::exp(2.0 * cp.tau_c);
  const double mc = cp.m_c;
  return 2.0 * (1.0 - mc) * (mc * mc + (1.0 - mc) * e) /
         (((1.0 - mc) + e) * std::pow(static_cast<double>(n), 1.5));
}

PairDiagnostics pair_diagnostics(long n) {
  const CriticalPoint& cp = critical_constants();
  const DiscreteLaw law = w_law(n);
  const DiscreteLaw counts = magnetization_law(n, cp.J_c, cp.h_c);
  const double scale = std::pow(static_cast<double>(n), -0.75);

  PairDiagnostics diag;
  diag.lambda = lambda(n);
  diag.delta_support_bound = 2.0 * scale;
  diag.resize(law.size());
  for (std::size_t i = 0; i < law.size(); ++i) {
    const long t = static_cast<long>(counts.locations()[i]);
    const PairClasses cls = pair_classes(n, t);
    const std::array<std::pair<int, double>, 3> classes = {
        {{2, cls.both_monomer}, {1, cls.mixed}, {0, cls.both_dimer}}};
    double m1 = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const auto& [k, weight] : classes) {
      if (weight <= 0.0) continue;
      const auto q = resample_law(n, t - k, cp.J_c, cp.h_c);
      for (int kp = 0; kp <= 2; ++kp) {
        if (q[kp] == 0.0) continue;
        const double d = static_cast<double>(k - kp) * scale;
        m1 += weight * q[kp] * d;
        m2 += weight * q[kp] * d * d;
        m4 += weight * q[kp] * d * d * d * d;
      }
    }
    const double w = law.locations()[i];
    diag.w[i] = w;
    diag.prob[i] = law.probs()[i];
    diag.log_prob[i] = law.log_probs()[i];
    diag.e_delta[i] = m1;
    diag.e_delta2[i] = m2;
    diag.e_delta4[i] = m4;
    diag.psi_w[i] = cp.lambda_c * w * w * w / 6.0;
    diag.remainder[i] = diag.lambda * diag.psi_w[i] - m1;
  }
  return diag;
}

TransitionKernel transition_kernel(long n, double J, double h) {
  const DiscreteLaw counts = magnetization_law(n, J, h);
  TransitionKernel kernel;
  kernel.up.assign(counts.size(), 0.0);
  kernel.down.assign(counts.size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const long t = static_cast<long>(counts.locations()[i]);
    const PairClasses cls = pair_classes(n, t);
    if (cls.both_dimer > 0.0) kernel.up[i] = cls.both_dimer * resample_law(n, t, J, h)[2];
    if (cls.both_monomer > 0.0) kernel.down[i] = cls.both_monomer * resample_law(n, t - 2, J, h)[0];
  }
  return kernel;
}

double remainder_constant(const PairDiagnostics& diag, long n) {
  const double factor = std::pow(static_cast<double>(n), 1.75);
  double out = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double w2 = diag.w[i] * diag.w[i];
    out = std::max(out, std::abs(diag.remainder[i]) * factor / (w2 * w2 + 1.0));
  }
  return out;
}

double verify_cond_var_scaling(const PairDiagnostics& diag, long n) {
  const double factor = std::pow(static_cast<double>(n), 0.25);
  double out = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double ratio = diag.e_delta2[i] / (2.0 * diag.lambda);
    out = std::max(out, std::abs(ratio - 1.0) * factor / (std::abs(diag.w[i]) + 1.0));
  }
  return out;
}

double verify_cond_var_scaling(long n) { return verify_cond_var_scaling(pair_diagnostics(n), n); }

double tail_concentration(long n, double delta) {
  if (!(delta > 0.0)) throw InvalidParameter("tail_concentration: delta must be positive");
  const DiscreteLaw law = w_law(n);
  const double cut = delta * std::pow(static_cast<double>(n), 0.25);
  std::vector<double> terms;
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (std::abs(law.locations()[i]) > cut) terms.push_back(law.log_probs()[i]);
  }
  if (terms.empty()) return 0.0;
  return std::exp(kernels::log_sum_exp(terms));
}

}  // namespace steinbound::monomer_dimer
