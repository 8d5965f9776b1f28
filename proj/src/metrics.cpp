#include "steinbound/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "steinbound/curie_weiss.hpp"
#include "steinbound/errors.hpp"
#include "steinbound/kernels.hpp"
#include "steinbound/monomer_dimer.hpp"

namespace steinbound {

namespace {

constexpr double kCutTolerance = 1e-16;
constexpr double kBisectTolerance = 1e-10;
constexpr double kMaxCut = 1e6;

double weight(double z, double p) { return p == 0.0 ? 1.0 : std::pow(1.0 + std::abs(z), p); }

// F_n on one constant piece, kept in both small-side forms.
struct Piece {
  double lower;  // P(X <= z)
  double upper;  // P(X > z)
};

// Limit-law tail on the small side: P(Y <= z) for z <= 0, P(Y > z) for z > 0.
double small_tail(const LimitLaw& law, double z) { return z <= 0.0 ? law.cdf(z) : law.upper_tail(z); }

// F_n(z) - F(z) from the small-side representations; decreasing in z on a piece.
double signed_gap(double z, double tail, const Piece& c) {
  return z <= 0.0 ? c.lower - tail : tail - c.upper;
}

class Search {
 public:
  Search(const LimitLaw& law, double p, const DistanceOptions& options, DistanceProfile& out)
      : law_(law), p_(p), options_(options), out_(out) {}

  void record(double z, double gap) {
    const double weighted = weight(z, p_) * gap;
    if (options_.keep_records) out_.records.push_back({z, gap, weighted});
    if (weighted > out_.supremum) {
      out_.supremum = weighted;
      out_.argsup = z;
    }
  }

  double gap_at(double z, const Piece& c) const { return signed_gap(z, small_tail(law_, z), c); }

  // [lo, hi] with known limit-law tails at the ends; F_n constant (= c) inside.
  void segment(double lo, double tail_lo, double hi, double tail_hi, const Piece& c) {
    const double g_lo = signed_gap(lo, tail_lo, c);
    const double g_hi = signed_gap(hi, tail_hi, c);
    record(lo, std::abs(g_lo));
    record(hi, std::abs(g_hi));
    for (int i = 1; i <= options_.interior_grid; ++i) {
      const double z = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options_.interior_grid + 1);
      record(z, std::abs(gap_at(z, c)));
    }
    // With p = 0 the gap is monotone on each side of its zero, so the ends win.
    if (p_ == 0.0) return;
    if (lo < 0.0 && hi > 0.0) {
      const double g0 = gap_at(0.0, c);
      record(0.0, std::abs(g0));
      same_side(lo, g_lo, 0.0, g0, c);
      same_side(0.0, g0, hi, g_hi, c);
    } else {
      same_side(lo, g_lo, hi, g_hi, c);
    }
  }

 private:
  // Both ends on the same side of 0. Splits at the zero of the gap, then looks
  // for an interior maximum on each part.
  void same_side(double lo, double g_lo, double hi, double g_hi, const Piece& c) {
    if (!(hi > lo)) return;
    if (g_lo > 0.0 && g_hi < 0.0) {
      double a = lo;
      double b = hi;
      while (b - a > kBisectTolerance) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (gap_at(mid, c) > 0.0 ? a : b) = mid;
      }
      const double root = 0.5 * (a + b);
      const double g_root = gap_at(root, c);
      stationary(lo, g_lo, root, g_root, c);
      stationary(root, g_root, hi, g_hi, c);
      return;
    }
    stationary(lo, g_lo, hi, g_hi, c);
  }

  // Derivative of (1+|z|)^p |gap| up to a positive factor:
  // p sgn(z) |gap| - (1+|z|) s density(z), where s = sign(gap).
  double slope(double z, double zsign, double s, const Piece& c) const {
    const double g = gap_at(z, c);
    return p_ * zsign * std::abs(g) - (1.0 + std::abs(z)) * s * law_.density(z);
  }

  void stationary(double lo, double g_lo, double hi, double g_hi, const Piece& c) {
    if (!(hi > lo)) return;
    const double s = (g_lo + g_hi) > 0.0 ? 1.0 : -1.0;
    const double zsign = (lo + hi) > 0.0 ? 1.0 : -1.0;
    double a = lo;
    double b = hi;
    if (!(slope(a, zsign, s, c) > 0.0 && slope(b, zsign, s, c) < 0.0)) return;
    while (b - a > kBisectTolerance) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (slope(mid, zsign, s, c) > 0.0 ? a : b) = mid;
    }
    const double z = 0.5 * (a + b);
    record(z, std::abs(gap_at(z, c)));
  }

  const LimitLaw& law_;
  double p_;
  const DistanceOptions& options_;
  DistanceProfile& out_;
};

// Smallest z (on a 5% geometric grid from 1) beyond which every weighted tail
// is certified below kCutTolerance: the limit law via its Mills-type bound
// (and (1+z)^p exp(-a z^2k) already decreasing), the discrete law via
// sum_{|x_i| > z} (1+|x_i|)^p p_i.
double find_z_cut(const DiscreteLaw& disc, const LimitLaw& law, double p) {
  const auto x = disc.locations();
  const auto pr = disc.probs();
  const std::size_t n = x.size();
  std::vector<double> upper_w(n + 1, 0.0);  // sum over j >= i
  for (std::size_t i = n; i-- > 0;) upper_w[i] = upper_w[i + 1] + weight(x[i], p) * pr[i];
  std::vector<double> lower_w(n + 1, 0.0);  // sum over j < i
  for (std::size_t i = 0; i < n; ++i) lower_w[i + 1] = lower_w[i] + weight(x[i], p) * pr[i];

  const double k2 = 2.0 * law.k();
  for (double z = 1.0; z < kMaxCut; z *= 1.05) {
    const bool decreasing = p / (1.0 + z) < k2 * law.a() * std::pow(z, k2 - 1.0);
    if (!decreasing || weight(z, p) * law.tail_bound(z) >= kCutTolerance) continue;
    const auto above = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), z) - x.begin());
    const auto below = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), -z) - x.begin());
    if (upper_w[above] < kCutTolerance && lower_w[below] < kCutTolerance) return z;
  }
  throw NumericConsistencyError("weighted_distance: no tail cutoff below " + std::to_string(kMaxCut));
}

}  // namespace

DistanceProfile weighted_distance(const DiscreteLaw& disc, const LimitLaw& law, double p,
                                  const DistanceOptions& options) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidParameter("weighted_distance: p must be >= 0");
  if (options.interior_grid < 0) throw InvalidParameter("weighted_distance: interior_grid must be >= 0");
  if (std::abs(disc.total_mass() - 1.0) > 1e-9) {
    throw InvalidParameter("weighted_distance: discrete law is not normalized");
  }

  DistanceProfile out;
  out.p = p;
  out.z_cut = find_z_cut(disc, law, p);
  Search search(law, p, options, out);

  const auto x = disc.locations();
  const auto piece = [&](std::size_t j) {
    // F_n on [x_{j-1}, x_j)
    if (j == 0) return Piece{0.0, 1.0};
    return Piece{disc.cumulative(j - 1), disc.upper_cumulative(j - 1)};
  };

  // Boundaries: -z_cut, the atoms strictly inside the window, +z_cut.
  const auto first = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), -out.z_cut) - x.begin());
  const auto last = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), out.z_cut) - x.begin());
  std::vector<double> bounds;
  bounds.reserve(last - first + 2);
  bounds.push_back(-out.z_cut);
  for (std::size_t i = first; i < last; ++i) bounds.push_back(x[i]);
  bounds.push_back(out.z_cut);

  std::vector<double> tails(bounds.size());
  for (std::size_t m = 0; m < bounds.size(); ++m) tails[m] = small_tail(law, bounds[m]);

  for (std::size_t m = 0; m + 1 < bounds.size(); ++m) {
    // first + m atoms lie at or left of bounds[m].
    search.segment(bounds[m], tails[m], bounds[m + 1], tails[m + 1], piece(first + m));
  }
  return out;
}

RateFit rate_fit(std::span<const long> ns, std::span<const double> distances, std::optional<double> target_slope) {
  if (ns.size() != distances.size()) throw InvalidParameter("rate_fit: ns and distances differ in length");
  if (ns.size() < 3) throw InvalidParameter("rate_fit: need at least 3 points");
  RateFit fit;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] <= 0) throw InvalidParameter("rate_fit: n must be positive");
    if (!(distances[i] > 0.0) || !std::isfinite(distances[i])) {
      throw InvalidParameter("rate_fit: distances must be positive and finite");
    }
    fit.log_n.push_back(std::log(static_cast<double>(ns[i])));
    fit.log_d.push_back(std::log(distances[i]));
  }
  const double m = static_cast<double>(ns.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += fit.log_n[i];
    my += fit.log_d[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = fit.log_n[i] - mx;
    const double dy = fit.log_d[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidParameter("rate_fit: ns must not all be equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = fit.log_d[i] - (fit.intercept + fit.slope * fit.log_n[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.target_slope = target_slope.value_or(fit.slope);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    fit.empirical_constant = std::max(fit.empirical_constant,
                                      distances[i] * std::pow(static_cast<double>(ns[i]), -fit.target_slope));
  }
  return fit;
}

BoundReport bound_terms(const PairDiagnostics& diag, const DiscreteLaw& law_of_w, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("bound_terms: a must be positive");
  const auto loc = law_of_w.locations();
  if (diag.size() != law_of_w.size() || !std::equal(loc.begin(), loc.end(), diag.w.begin())) {
    throw InvalidParameter("bound_terms: diagnostics and law have different atoms");
  }
  const auto probs = law_of_w.probs();
  const double lambda = diag.lambda;
  std::vector<double> tmp(diag.size());

  BoundReport r;
  r.a_used = a;
  for (std::size_t i = 0; i < tmp.size(); ++i) {
    const double d = 1.0 - diag.e_delta2[i] / (2.0 * lambda);
    tmp[i] = d * d;
  }
  r.term_condvar = std::sqrt(kernels::dot(probs, tmp));
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = diag.remainder[i] * diag.remainder[i];
  r.term_remainder = std::sqrt(kernels::dot(probs, tmp)) / lambda;
  r.term_a = a;
  r.term_a3 = a * a * a / lambda;
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = diag.e_delta4_above(i, a);
  r.term_delta4 = std::sqrt(kernels::dot(probs, tmp)) / lambda;
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = diag.e_delta2_above(i, a);
  r.uniform_variant_delta2 = kernels::dot(probs, tmp) / lambda;
  return r;
}

std::string_view model_name(Model model) noexcept {
  return model == Model::curie_weiss ? "curie-weiss" : "monomer-dimer";
}

Model parse_model(std::string_view name) {
  if (name == "curie-weiss" || name == "curie_weiss") return Model::curie_weiss;
  if (name == "monomer-dimer" || name == "monomer_dimer") return Model::monomer_dimer;
  throw InvalidParameter("model: expected curie-weiss or monomer-dimer, got '" + std::string(name) + "'");
}

ModelSnapshot make_snapshot(Model model, long n, double beta) {
  if (model == Model::curie_weiss) {
    return {model, n, curie_weiss::w_law(n, beta), curie_weiss::pair_diagnostics(n, beta),
            curie_weiss::critical_limit_law(), 0.5};
  }
  return {model, n, monomer_dimer::w_law(n), monomer_dimer::pair_diagnostics(n), monomer_dimer::critical_limit_law(),
          0.25};
}

AuditResult theorem_audit(const ModelSnapshot& snapshot, double p, std::optional<double> a,
                          const DistanceOptions& options) {
  AuditResult out{snapshot.model, snapshot.n, p, weighted_distance(snapshot.law_of_w, snapshot.limit, p, options),
                  bound_terms(snapshot.diag, snapshot.law_of_w, a.value_or(snapshot.diag.delta_support_bound)),
                  0.0, 0.0};
  out.implied_const_rate = out.profile.supremum * std::pow(static_cast<double>(snapshot.n), snapshot.rate_exponent);
  out.implied_const_papernorm = out.implied_const_rate / std::pow(p, p / 2.0);
  return out;
}

AuditResult theorem_audit(Model model, long n, double p) { return theorem_audit(make_snapshot(model, n), p); }

}  // namespace steinbound
