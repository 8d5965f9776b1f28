#pragma once

// Weighted Kolmogorov distances between an exact discrete law and a limit
// law, rate fits over n, and the right-hand-side terms of the exchangeable
// pair bounds.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "steinbound/discrete_law.hpp"
#include "steinbound/limit_law.hpp"

namespace steinbound {

struct DistanceRecord {
  double z;
  double gap;       // |F_n(z) - F(z)|, one-sided limit from the evaluated interval
  double weighted;  // (1 + |z|)^p gap
};

struct DistanceProfile {
  double p = 0.0;
  std::vector<DistanceRecord> records;
  double supremum = 0.0;
  double argsup = 0.0;
  double z_cut = 0.0;  // search window [-z_cut, z_cut]; beyond it the weighted gap is < 1e-16
};

struct DistanceOptions {
  // Extra equally spaced evaluation points inside every inter-atom interval.
  // Only used to check that the stationary-point search misses nothing.
  int interior_grid = 0;
  // Keep every candidate in DistanceProfile::records (otherwise only the sup).
  bool keep_records = true;
};

/// sup_z (1 + |z|)^p |F_n(z) - F(z)| over both one-sided limits at every atom
/// and the interior stationary points of each constant piece of F_n. Throws
/// InvalidParameter if p < 0 or disc is not normalized within 1e-9.
DistanceProfile weighted_distance(const DiscreteLaw& disc, const LimitLaw& law, double p,
                                  const DistanceOptions& options = {});

struct RateFit {
  std::vector<double> log_n;
  std::vector<double> log_d;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double target_slope = 0.0;
  double empirical_constant = 0.0;  // max_n D(n) n^(-target_slope)
};

/// Least squares of log D on log n. target_slope defaults to the fitted slope.
/// Throws InvalidParameter on length mismatch, fewer than 3 points, or
/// nonpositive values.
RateFit rate_fit(std::span<const long> ns, std::span<const double> distances,
                 std::optional<double> target_slope = std::nullopt);

struct BoundReport {
  double term_condvar = 0.0;    // sqrt(E(1 - E(Delta^2|W) / (2 lambda))^2)
  double term_remainder = 0.0;  // sqrt(E R^2) / lambda
  double term_a = 0.0;          // a
  double term_a3 = 0.0;         // a^3 / lambda
  double term_delta4 = 0.0;     // sqrt(E Delta^4 1(|Delta| > a)) / lambda
  double uniform_variant_delta2 = 0.0;  // E Delta^2 1(|Delta| > a) / lambda
  double a_used = 0.0;

  /// Bracket of the non-uniform bound (fourth-moment truncation term).
  double nonuniform_sum() const noexcept {
    return term_condvar + term_remainder + term_a + term_a3 + term_delta4;
  }
  /// Bracket of the uniform bound (second-moment truncation term).
  double uniform_sum() const noexcept {
    return term_condvar + term_remainder + term_a + term_a3 + uniform_variant_delta2;
  }
};

/// Exact atom sums. Throws InvalidParameter if diag and law_of_w do not have
/// identical atoms, or a is not positive.
BoundReport bound_terms(const PairDiagnostics& diag, const DiscreteLaw& law_of_w, double a);

enum class Model { curie_weiss, monomer_dimer };

std::string_view model_name(Model model) noexcept;
/// Accepts "curie-weiss" / "monomer-dimer" (and underscores). Throws
/// InvalidParameter otherwise.
Model parse_model(std::string_view name);

/// Everything an audit needs at one n, computed once and shared across p.
struct ModelSnapshot {
  Model model;
  long n;
  DiscreteLaw law_of_w;
  PairDiagnostics diag;
  LimitLaw limit;
  double rate_exponent;  // 1/2 or 1/4
};

ModelSnapshot make_snapshot(Model model, long n, double beta = 1.0);

struct AuditResult {
  Model model;
  long n;
  double p;
  DistanceProfile profile;
  BoundReport terms;
  double implied_const_rate;       // sup (1+|z|)^p |dF| n^rate
  double implied_const_papernorm;  // implied_const_rate / p^(p/2)
};

/// a defaults to the pair's support bound 2 / n^(3/4).
AuditResult theorem_audit(const ModelSnapshot& snapshot, double p, std::optional<double> a = std::nullopt,
                          const DistanceOptions& options = {.interior_grid = 0, .keep_records = false});
AuditResult theorem_audit(Model model, long n, double p);

}  // namespace steinbound
