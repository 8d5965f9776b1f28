#include "steinbound/discrete_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "steinbound/errors.hpp"
#include "steinbound/kernels.hpp"

namespace steinbound {

DiscreteLaw DiscreteLaw::from_log_weights(std::vector<double> locations,
                                          std::vector<double> log_weights) {
  if (locations.size() != log_weights.size()) {
    throw InvalidParameter("DiscreteLaw: locations and weights differ in length");
  }
  if (locations.empty()) throw InvalidParameter("DiscreteLaw: empty support");
  for (std::size_t i = 1; i < locations.size(); ++i) {
    if (!(locations[i - 1] < locations[i])) {
      throw InvalidParameter("DiscreteLaw: locations must be strictly increasing (index " +
                             std::to_string(i) + ")");
    }
  }
  const double log_total = kernels::log_sum_exp(log_weights);
  if (!std::isfinite(log_total)) throw InvalidParameter("DiscreteLaw: total weight is not finite");

  DiscreteLaw law;
  law.locations_ = std::move(locations);
  law.log_probs_ = std::move(log_weights);
  for (double& lp : law.log_probs_) lp -= log_total;
  law.probs_.resize(law.log_probs_.size());
  kernels::exp_shifted(law.log_probs_, 0.0, law.probs_);
  law.log_normalization_ = kernels::log_sum_exp(law.log_probs_);
  law.build_cumulatives();
  return law;
}

void DiscreteLaw::build_cumulatives() {
  const std::size_t n = probs_.size();
  prefix_.assign(n, 0.0);
  suffix_.assign(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += probs_[i];
    prefix_[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix_[i] = acc;
    acc += probs_[i];
  }
}

double DiscreteLaw::total_mass() const { return kernels::sum(probs_); }

double DiscreteLaw::cdf(double z) const {
  const auto it = std::upper_bound(locations_.begin(), locations_.end(), z);
  if (it == locations_.begin()) return 0.0;
  const auto i = static_cast<std::size_t>(it - locations_.begin()) - 1;
  // Use the smaller of the two sums for precision, complementing when needed.
  return prefix_[i] <= suffix_[i] ? prefix_[i] : 1.0 - suffix_[i];
}

double DiscreteLaw::upper_tail(double z) const {
  const auto it = std::upper_bound(locations_.begin(), locations_.end(), z);
  if (it == locations_.begin()) return 1.0;
  const auto i = static_cast<std::size_t>(it - locations_.begin()) - 1;
  return suffix_[i] <= prefix_[i] ? suffix_[i] : 1.0 - prefix_[i];
}

double DiscreteLaw::abs_moment(double m) const {
  if (!(m >= 0.0)) throw DomainError("abs_moment: m must be >= 0");
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double x = std::abs(locations_[i]);
    if (m == 0.0) {
      terms[i] = log_probs_[i];
    } else {
      terms[i] = x == 0.0 ? -std::numeric_limits<double>::infinity() : log_probs_[i] + m * std::log(x);
    }
  }
  return std::exp(kernels::log_sum_exp(terms));
}

double DiscreteLaw::expectation(std::span<const double> values) const {
  if (values.size() != size()) throw InvalidParameter("expectation: length mismatch");
  return kernels::dot(probs_, values);
}

DiscreteLaw DiscreteLaw::affine(double scale, double shift) const {
  if (!(scale > 0.0)) throw InvalidParameter("affine: scale must be positive");
  DiscreteLaw out = *this;
  for (double& x : out.locations_) x = scale * x + shift;
  return out;
}

void PairDiagnostics::resize(std::size_t n) {
  for (auto* v : {&w, &prob, &log_prob, &e_delta, &e_delta2, &e_delta4, &psi_w, &remainder}) {
    v->assign(n, 0.0);
  }
}

double detailed_balance_defect(const DiscreteLaw& law, const TransitionKernel& kernel) {
  if (kernel.up.size() != law.size() || kernel.down.size() != law.size()) {
    throw InvalidParameter("detailed_balance_defect: kernel and law sizes differ");
  }
  const auto lp = law.log_probs();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < law.size(); ++i) {
    const double forward = lp[i] + std::log(kernel.up[i]);
    const double backward = lp[i + 1] + std::log(kernel.down[i + 1]);
    if (forward == -INFINITY && backward == -INFINITY) continue;
    const double defect = std::abs(std::expm1(-std::abs(forward - backward)));
    worst = std::max(worst, defect);
  }
  return worst;
}

}  // namespace steinbound
