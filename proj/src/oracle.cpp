#include "steinbound/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "steinbound/curie_weiss.hpp"
#include "steinbound/errors.hpp"
#include "steinbound/monomer_dimer.hpp"

namespace steinbound::oracle {

namespace {

struct Bucket {
  double prob = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double m2_above = 0.0;
  double m4_above = 0.0;
  double up = 0.0;
  double down = 0.0;
};

// One step of the pair: joint probability wt of moving W by d, the
// magnetization moving from key to next_key.
void add_move(Bucket& b, double wt, double d, double a, long key, long next_key) {
  const double d2 = d * d;
  b.m1 += wt * d;
  b.m2 += wt * d2;
  b.m4 += wt * d2 * d2;
  if (std::abs(d) > a) {
    b.m2_above += wt * d2;
    b.m4_above += wt * d2 * d2;
  }
  if (next_key > key) b.up += wt;
  if (next_key < key) b.down += wt;
}

EnumeratedPair collect(const std::map<long, Bucket>& buckets, const std::function<double(long)>& w_of,
                       const std::function<double(double)>& psi, double lambda, double jump, double a) {
  EnumeratedPair e;
  e.lambda = lambda;
  e.jump = jump;
  e.a = a;
  for (const auto& [key, b] : buckets) {
    if (!(b.prob > 0.0)) continue;
    const double w = w_of(key);
    e.w.push_back(w);
    e.prob.push_back(b.prob);
    e.e_delta.push_back(b.m1 / b.prob);
    e.e_delta2.push_back(b.m2 / b.prob);
    e.e_delta4.push_back(b.m4 / b.prob);
    e.e_delta2_above.push_back(b.m2_above / b.prob);
    e.e_delta4_above.push_back(b.m4_above / b.prob);
    e.up.push_back(b.up / b.prob);
    e.down.push_back(b.down / b.prob);
    e.psi_w.push_back(psi(w));
  }
  return e;
}

// Every matching of K_n: the lowest free vertex is either a monomer or paired
// with a higher free vertex. counts[mask] collects matchings per monomer set.
void enumerate_matchings(int n, unsigned used, unsigned monomers, std::vector<std::uint64_t>& counts) {
  int v = 0;
  while (v < n && (used >> v & 1U)) ++v;
  if (v == n) {
    ++counts[monomers];
    return;
  }
  const unsigned bv = 1U << v;
  enumerate_matchings(n, used | bv, monomers | bv, counts);
  for (int u = v + 1; u < n; ++u) {
    if (used >> u & 1U) continue;
    enumerate_matchings(n, used | bv | (1U << u), monomers, counts);
  }
}

std::uint64_t perfect_matchings(int v, unsigned used) {
  int first = 0;
  while (first < v && (used >> first & 1U)) ++first;
  if (first == v) return 1;
  std::uint64_t total = 0;
  for (int u = first + 1; u < v; ++u) {
    if (used >> u & 1U) continue;
    total += perfect_matchings(v, used | (1U << first) | (1U << u));
  }
  return total;
}

double checked_a(double a, double jump) { return a > 0.0 ? a : jump; }

}  // namespace

EnumeratedPair enumerate_curie_weiss(long n, double beta, double a) {
  if (n < 1 || n > kMaxSpins) {
    throw InvalidParameter("oracle: curie-weiss n must be in [1, " + std::to_string(kMaxSpins) + "]");
  }
  const int sites = static_cast<int>(n);
  const std::size_t configs = std::size_t{1} << sites;
  const double dn = static_cast<double>(n);
  std::vector<double> log_w(configs);
  for (std::size_t mask = 0; mask < configs; ++mask) {
    double energy = 0.0;
    for (int i = 0; i < sites; ++i) {
      const double si = (mask >> i & 1U) ? 1.0 : -1.0;
      for (int j = i + 1; j < sites; ++j) energy += si * ((mask >> j & 1U) ? 1.0 : -1.0);
    }
    log_w[mask] = beta * energy / dn;
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double z = 0.0;
  for (double lw : log_w) z += std::exp(lw - top);

  // Same rounding as the library's jump, so |Delta| = a compares equal at a = jump.
  const double inv_scale = std::pow(dn, -0.75);
  const double jump = 2.0 * inv_scale;
  a = checked_a(a, jump);
  std::map<long, Bucket> buckets;
  for (std::size_t mask = 0; mask < configs; ++mask) {
    const double p = std::exp(log_w[mask] - top) / z;
    const long s = 2L * std::popcount(mask) - n;
    Bucket& b = buckets[s];
    b.prob += p;
    for (int site = 0; site < sites; ++site) {
      const std::size_t bit = std::size_t{1} << site;
      const double sigma = (mask & bit) ? 1.0 : -1.0;
      const double lp = log_w[mask | bit];
      const double lm = log_w[mask & ~bit];
      const double q_plus = 1.0 / (1.0 + std::exp(lm - lp));
      for (const double next : {1.0, -1.0}) {
        const double q = next > 0.0 ? q_plus : 1.0 - q_plus;
        const long s_next = s + static_cast<long>(next - sigma);
        add_move(b, p * q / dn, (sigma - next) * inv_scale, a, s, s_next);
      }
    }
  }
  return collect(
      buckets, [&](long s) { return static_cast<double>(s) * inv_scale; }, [](double w) { return w * w * w / 3.0; },
      std::pow(dn, -1.5), jump, a);
}

EnumeratedPair enumerate_monomer_dimer(long n, double a) {
  if (n < 2 || n > kMaxVertices) {
    throw InvalidParameter("oracle: monomer-dimer n must be in [2, " + std::to_string(kMaxVertices) + "]");
  }
  const auto& cp = monomer_dimer::critical_constants();
  const int vertices = static_cast<int>(n);
  const std::size_t configs = std::size_t{1} << vertices;
  const double dn = static_cast<double>(n);
  std::vector<std::uint64_t> counts(configs, 0);
  enumerate_matchings(vertices, 0U, 0U, counts);

  // Weight of a monomer set: (number of matchings) * exp(-H).
  std::vector<double> weight(configs, 0.0);
  double z = 0.0;
  for (std::size_t mask = 0; mask < configs; ++mask) {
    if (counts[mask] == 0) continue;
    const double m = static_cast<double>(std::popcount(mask)) / dn;
    weight[mask] =
        static_cast<double>(counts[mask]) * std::exp(dn * (cp.J_c * m * m + (0.5 * std::log(dn) + cp.h_c - cp.J_c) * m));
    z += weight[mask];
  }

  // Same rounding as the library's jump, so |Delta| = a compares equal at a = jump.
  const double inv_scale = std::pow(dn, -0.75);
  const double jump = 2.0 * inv_scale;
  a = checked_a(a, jump);
  const double pairs = dn * (dn - 1.0) / 2.0;
  std::map<long, Bucket> buckets;
  for (std::size_t mask = 0; mask < configs; ++mask) {
    if (weight[mask] == 0.0) continue;
    const double p = weight[mask] / z;
    const long t = std::popcount(mask);
    Bucket& b = buckets[t];
    b.prob += p;
    for (int u = 0; u < vertices; ++u) {
      for (int v = u + 1; v < vertices; ++v) {
        const std::size_t bu = std::size_t{1} << u;
        const std::size_t bv = std::size_t{1} << v;
        const std::size_t rest = mask & ~(bu | bv);
        const int before = ((mask & bu) ? 1 : 0) + ((mask & bv) ? 1 : 0);
        double total = 0.0;
        for (int assign = 0; assign < 4; ++assign) {
          total += weight[rest | ((assign & 1) ? bu : 0) | ((assign & 2) ? bv : 0)];
        }
        for (int assign = 0; assign < 4; ++assign) {
          const double wt = weight[rest | ((assign & 1) ? bu : 0) | ((assign & 2) ? bv : 0)];
          if (wt == 0.0) continue;
          const int after = (assign & 1) + (assign >> 1 & 1);
          add_move(b, p * (wt / total) / pairs, static_cast<double>(before - after) * inv_scale, a, t,
                   t - before + after);
        }
      }
    }
  }
  const double root = std::pow(dn, 0.25);
  return collect(
      buckets, [&](long t) { return root * (static_cast<double>(t) / dn - cp.m_c); },
      [&](double w) { return cp.lambda_c * w * w * w / 6.0; }, monomer_dimer::lambda(n), jump, a);
}

std::uint64_t count_perfect_matchings(int v) {
  if (v < 0 || v > 16) throw InvalidParameter("count_perfect_matchings: v must be in [0, 16]");
  if (v % 2 != 0) return 0;
  return perfect_matchings(v, 0U);
}

BoundReport enumerated_bound_terms(const EnumeratedPair& e) {
  double condvar = 0.0;
  double rem = 0.0;
  double d4 = 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < e.w.size(); ++i) {
    const double c = 1.0 - e.e_delta2[i] / (2.0 * e.lambda);
    const double r = e.lambda * e.psi_w[i] - e.e_delta[i];
    condvar += e.prob[i] * c * c;
    rem += e.prob[i] * r * r;
    d4 += e.prob[i] * e.e_delta4_above[i];
    d2 += e.prob[i] * e.e_delta2_above[i];
  }
  BoundReport out;
  out.a_used = e.a;
  out.term_condvar = std::sqrt(condvar);
  out.term_remainder = std::sqrt(rem) / e.lambda;
  out.term_a = e.a;
  out.term_a3 = e.a * e.a * e.a / e.lambda;
  out.term_delta4 = std::sqrt(d4) / e.lambda;
  out.uniform_variant_delta2 = d2 / e.lambda;
  return out;
}

bool SuiteReport::passed() const noexcept { return first_failure() == nullptr; }

const Comparison* SuiteReport::first_failure() const noexcept {
  for (const auto& c : comparisons) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

namespace {

class Recorder {
 public:
  Recorder(SuiteReport& report, std::string prefix, double tolerance)
      : report_(report), prefix_(std::move(prefix)), tolerance_(tolerance) {}

  // max_i |x_i - y_i| / unit
  void absolute(const std::string& what, std::span<const double> x, std::span<const double> y, double unit = 1.0) {
    double err = x.size() == y.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) err = std::max(err, std::abs(x[i] - y[i]) / unit);
    push(what, err, tolerance_);
  }

  void relative(const std::string& what, double x, double y, double tolerance) {
    const double err = x == y ? 0.0 : std::abs(x - y) / std::max(std::abs(y), 1e-300);
    push(what, err, tolerance);
  }

  void push(const std::string& what, double err, double tolerance) {
    report_.comparisons.push_back({prefix_ + " " + what, err, err <= tolerance});
  }

 private:
  SuiteReport& report_;
  std::string prefix_;
  double tolerance_;
};

void compare_pair(Recorder& rec, const DiscreteLaw& law, const PairDiagnostics& diag, const TransitionKernel& kernel,
                  long n, double beta, Model model, double tolerance) {
  const bool cw = model == Model::curie_weiss;
  const EnumeratedPair e = cw ? enumerate_curie_weiss(n, beta) : enumerate_monomer_dimer(n);
  const double j = e.jump;
  std::vector<double> lib_rem(diag.remainder.begin(), diag.remainder.end());
  std::vector<double> enum_rem(e.w.size());
  for (std::size_t i = 0; i < e.w.size(); ++i) enum_rem[i] = e.lambda * e.psi_w[i] - e.e_delta[i];

  rec.absolute("atoms", law.locations(), e.w);
  rec.absolute("law", law.probs(), e.prob);
  rec.absolute("e_delta", diag.e_delta, e.e_delta, j);
  rec.absolute("e_delta2", diag.e_delta2, e.e_delta2, j * j);
  rec.absolute("e_delta4", diag.e_delta4, e.e_delta4, j * j * j * j);
  rec.absolute("remainder", lib_rem, enum_rem, j);
  rec.absolute("kernel_up", kernel.up, e.up);
  rec.absolute("kernel_down", kernel.down, e.down);
  rec.relative("lambda", diag.lambda, e.lambda, tolerance);

  // Bound terms at the support bound and strictly below it.
  for (const double a : {j, 0.5 * j}) {
    const EnumeratedPair ea = a == j ? e : (cw ? enumerate_curie_weiss(n, beta, a) : enumerate_monomer_dimer(n, a));
    const BoundReport lib = bound_terms(diag, law, a);
    const BoundReport ref = enumerated_bound_terms(ea);
    const std::string tag = a == j ? " a=jump" : " a=jump/2";
    const double tol = 10.0 * tolerance;
    rec.relative("term_condvar" + tag, lib.term_condvar, ref.term_condvar, tol);
    rec.relative("term_remainder" + tag, lib.term_remainder, ref.term_remainder, tol);
    rec.relative("term_a3" + tag, lib.term_a3, ref.term_a3, tol);
    rec.relative("term_delta4" + tag, lib.term_delta4, ref.term_delta4, tol);
    rec.relative("uniform_variant_delta2" + tag, lib.uniform_variant_delta2, ref.uniform_variant_delta2, tol);
  }
}

}  // namespace

SuiteReport run_oracle_suite(const std::vector<Model>& models, long max_n, double tolerance) {
  if (models.empty()) throw InvalidParameter("oracle: model list is empty");
  if (max_n < 2) throw InvalidParameter("oracle: max_n must be >= 2");
  if (max_n > kMaxSpins) {
    throw InvalidParameter("oracle: max_n = " + std::to_string(max_n) + " exceeds the cap of " +
                           std::to_string(kMaxSpins));
  }
  const bool dimers = std::find(models.begin(), models.end(), Model::monomer_dimer) != models.end();
  if (dimers && max_n > kMaxVertices) {
    throw InvalidParameter("oracle: monomer-dimer max_n = " + std::to_string(max_n) + " exceeds the cap of " +
                           std::to_string(kMaxVertices));
  }

  SuiteReport report;
  for (const Model model : models) {
    for (long n = 2; n <= max_n; ++n) {
      Recorder rec(report, std::string(model_name(model)) + " n=" + std::to_string(n), tolerance);
      if (model == Model::curie_weiss) {
        compare_pair(rec, curie_weiss::w_law(n), curie_weiss::pair_diagnostics(n), curie_weiss::transition_kernel(n), n,
                     1.0, model, tolerance);
        continue;
      }
      const auto& cp = monomer_dimer::critical_constants();
      compare_pair(rec, monomer_dimer::w_law(n), monomer_dimer::pair_diagnostics(n),
                   monomer_dimer::transition_kernel(n, cp.J_c, cp.h_c), n, 1.0, model, tolerance);

      // D(sigma) = (n - t - 1)!!: matching enumeration, perfect-matching
      // enumeration of the complement, and the explicit product must agree.
      std::vector<std::uint64_t> counts(std::size_t{1} << n, 0);
      enumerate_matchings(static_cast<int>(n), 0U, 0U, counts);
      double worst = 0.0;
      double worst_log = 0.0;
      for (std::size_t mask = 0; mask < counts.size(); ++mask) {
        const int v = static_cast<int>(n) - std::popcount(mask);
        std::uint64_t dfact = v % 2 == 0 ? 1 : 0;
        for (int f = v - 1; f > 1 && v % 2 == 0; f -= 2) dfact *= static_cast<std::uint64_t>(f);
        const std::uint64_t pm = count_perfect_matchings(v);
        if (counts[mask] != dfact || pm != dfact) worst = INFINITY;
        if (dfact > 0) {
          worst_log = std::max(worst_log, std::abs(monomer_dimer::matching_count_log(v) -
                                                   std::log(static_cast<double>(dfact))));
        } else if (monomer_dimer::matching_count_log(v) != -INFINITY) {
          worst_log = INFINITY;
        }
      }
      rec.push("matching_counts", worst, 0.0);
      rec.push("matching_count_log", worst_log, tolerance);
    }
  }
  return report;
}

}  // namespace steinbound::oracle
