#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace steinbound {

/// Exact finite-support law: strictly increasing atom locations with
/// log-probabilities normalized by log-sum-exp. Probabilities that underflow
/// stay available in log space.
class DiscreteLaw {
 public:
  /// Normalizes arbitrary log-weights (entries may be -inf). Throws
  /// InvalidParameter if sizes differ, the support is empty, locations are not
  /// strictly increasing, or the total weight is zero.
  static DiscreteLaw from_log_weights(std::vector<double> locations, std::vector<double> log_weights);

  std::size_t size() const noexcept { return locations_.size(); }
  std::span<const double> locations() const noexcept { return locations_; }
  std::span<const double> log_probs() const noexcept { return log_probs_; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// log of the total probability after normalization (zero up to rounding).
  double log_normalization() const noexcept { return log_normalization_; }

  /// sum of exp(log_probs) in the kernels' fixed order.
  double total_mass() const;

  /// P(X <= z), right-continuous.
  double cdf(double z) const;
  /// P(X > z), summed from the upper end.
  double upper_tail(double z) const;

  /// P(X <= locations[i]) and P(X > locations[i]).
  double cumulative(std::size_t i) const noexcept { return prefix_[i]; }
  double upper_cumulative(std::size_t i) const noexcept { return suffix_[i]; }

  /// E|X|^m, accumulated in log space. m = 0 gives the total mass.
  double abs_moment(double m) const;

  /// sum_i p_i v_i
  double expectation(std::span<const double> values) const;

  /// Same atoms, locations mapped by x -> scale * x + shift (scale > 0).
  DiscreteLaw affine(double scale, double shift) const;

 private:
  DiscreteLaw() = default;
  void build_cumulatives();

  std::vector<double> locations_;
  std::vector<double> log_probs_;
  std::vector<double> probs_;
  std::vector<double> prefix_;  // P(X <= x_i)
  std::vector<double> suffix_;  // P(X > x_i)
  double log_normalization_ = 0.0;
};

/// Exchangeable-pair statistics per atom of W, in structure-of-arrays form.
///
/// Both supported models move W by 0 or +-jump per step, so
/// E(Delta^m 1(|Delta| > a) | w) is either the full conditional moment (a < jump)
/// or exactly zero (a >= jump).
struct PairDiagnostics {
  double lambda = 0.0;
  double delta_support_bound = 0.0;  // the jump size
  std::vector<double> w;
  std::vector<double> prob;
  std::vector<double> log_prob;
  std::vector<double> e_delta;
  std::vector<double> e_delta2;
  std::vector<double> e_delta4;
  std::vector<double> psi_w;
  std::vector<double> remainder;  // lambda * psi(w) - E(Delta | w)

  std::size_t size() const noexcept { return w.size(); }

  void resize(std::size_t n);

  /// E(Delta^2 1(|Delta| > a) | w_i)
  double e_delta2_above(std::size_t i, double a) const noexcept {
    return a < delta_support_bound ? e_delta2[i] : 0.0;
  }
  double e_delta4_above(std::size_t i, double a) const noexcept {
    return a < delta_support_bound ? e_delta4[i] : 0.0;
  }
  /// E(Delta^2 1(|Delta| <= a) | w_i)
  double e_delta2_within(std::size_t i, double a) const noexcept {
    return a < delta_support_bound ? 0.0 : e_delta2[i];
  }
};

/// Magnetization-level transition probabilities of the pair dynamics:
/// from atom i, up[i] to atom i+1, down[i] to atom i-1, the rest stays.
struct TransitionKernel {
  std::vector<double> up;
  std::vector<double> down;
};

/// Largest relative detailed-balance defect
/// |pi_i up_i - pi_{i+1} down_{i+1}| / max(pi_i up_i, pi_{i+1} down_{i+1})
/// over adjacent atom pairs, computed in log space.
double detailed_balance_defect(const DiscreteLaw& law, const TransitionKernel& kernel);

}  // namespace steinbound
