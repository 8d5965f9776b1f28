// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// and the wall time. `--only N` runs a single criterion (used by ctest).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "steinbound/curie_weiss.hpp"
#include "steinbound/metrics.hpp"
#include "steinbound/monomer_dimer.hpp"
#include "steinbound/oracle.hpp"
#include "steinbound/quadrature.hpp"
#include "steinbound/stein.hpp"
#include "steinbound/sweep.hpp"

namespace sb = steinbound;
namespace cw = steinbound::curie_weiss;
namespace md = steinbound::monomer_dimer;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Collects sub-checks; the first failing one goes first in the detail text.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) {
      notes_.push_back(what);
    } else {
      passed_ = false;
      failures_.push_back(what);
    }
  }
  Outcome done() const {
    std::string text;
    for (const auto& f : failures_) text += (text.empty() ? "" : "; ") + std::string("FAILED ") + f;
    for (const auto& n : notes_) text += (text.empty() ? "" : "; ") + n;
    return {passed_, text};
  }

 private:
  bool passed_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<sb::LimitLaw> three_laws() { return {sb::LimitLaw(1, 0.5), sb::LimitLaw(2, 1.0 / 12.0), sb::LimitLaw(3, 1.0)}; }

Outcome stein_equation() {
  Checks c;
  double worst_residual = 0.0;
  long positivity = 0, upper = 0, slope = 0, points = 0;
  for (const auto& law : three_laws()) {
    const double cap = 1.0 / (2.0 * law.b());
    for (double z : {-5.0, -1.0, 0.0, 1.0, 5.0, 8.0}) {
      const sb::SteinSolution sol(law, z);
      for (int i = 0; i < 200; ++i) {
        const double x = -10.0 + 20.0 * i / 199.0;
        if (std::abs(x - z) < 1e-6) continue;
        ++points;
        worst_residual = std::max(worst_residual, std::abs(sol.residual(x)));
        // f underflows for k = 3 far from z; positivity is judged on log f.
        if (!std::isfinite(sol.log_f(x)) || sol.f(x) < 0.0) ++positivity;
        if (sol.f(x) > cap) ++upper;
        if (std::abs(sol.f_prime(x)) > 1.0) ++slope;
      }
    }
  }
  c.expect(worst_residual < 1e-8, "max |residual| " + sci(worst_residual) + " < 1e-08");
  c.expect(positivity == 0, "f > 0 violations " + std::to_string(positivity));
  c.expect(upper == 0, "f <= 1/(2b) violations " + std::to_string(upper));
  c.expect(slope == 0, "|f'| <= 1 violations " + std::to_string(slope) + " over " + std::to_string(points) + " points");
  return c.done();
}

Outcome closed_forms() {
  Checks c;
  double worst_b = 0.0;
  double worst_m = 0.0;
  for (const auto& law : three_laws()) {
    const int k = law.k();
    const double a = law.a();
    const double reach = std::pow(800.0 / a, 1.0 / (2 * k));
    // Independent quadrature over a symmetric window split at 0.
    auto integral = [&](double m) {
      const auto f = [&](double x) { return std::pow(x, m) * std::exp(-a * std::pow(x, 2 * k)); };
      return 2.0 * sb::quadrature::integrate(f, 0.0, reach, {.abs = 1e-15, .rel = 1e-13, .max_subdivisions = 4000}).value;
    };
    const double b_gamma = k * std::pow(a, 1.0 / (2 * k)) / std::tgamma(1.0 / (2 * k));
    const double b_quad = 1.0 / integral(0.0);
    worst_b = std::max({worst_b, std::abs(b_quad - b_gamma) / b_gamma, std::abs(law.b() - b_gamma) / b_gamma});
    for (double m : {0.0, 1.0, 2.0, 4.0, 6.0}) {
      const double gamma = std::pow(a, -m / (2 * k)) * std::tgamma((m + 1) / (2 * k)) / std::tgamma(1.0 / (2 * k));
      const double quad = b_gamma * integral(m);
      worst_m = std::max({worst_m, std::abs(quad - gamma) / gamma, std::abs(law.abs_moment(m) - gamma) / gamma});
    }
  }
  c.expect(worst_b <= 1e-9, "b relative gap " + sci(worst_b) + " <= 1e-09");
  c.expect(worst_m <= 1e-9, "E|Y|^m relative gap " + sci(worst_m) + " <= 1e-09 (m = 0,1,2,4,6)");
  return c.done();
}

Outcome mills_bound() {
  Checks c;
  long violations = 0;
  double margin = 1.0;
  for (const auto& law : three_laws()) {
    for (int i = 1; i <= 800; ++i) {
      const double x = 8.0 * i / 800.0;
      const double gap = law.tail_bound(x) - law.upper_tail(x);
      if (gap < 0.0) ++violations;
      margin = std::min(margin, gap);
    }
  }
  c.expect(violations == 0, "violations " + std::to_string(violations) + " on 3 x 800 grid, min margin " + sci(margin));
  return c.done();
}

Outcome oracle_equivalence() {
  Checks c;
  const auto spins = sb::oracle::run_oracle_suite({sb::Model::curie_weiss}, 12, 1e-12);
  const auto dimers = sb::oracle::run_oracle_suite({sb::Model::monomer_dimer}, 10, 1e-12);
  double worst = 0.0;
  for (const auto* r : {&spins, &dimers})
    for (const auto& cmp : r->comparisons) worst = std::max(worst, cmp.max_error);
  const auto* bad = spins.first_failure() ? spins.first_failure() : dimers.first_failure();
  c.expect(bad == nullptr, bad ? "first mismatch " + bad->name + " error " + sci(bad->max_error)
                               : std::to_string(spins.comparisons.size() + dimers.comparisons.size()) +
                                     " comparisons, max error " + sci(worst));
  bool counts = true;
  for (int v = 0; v <= 14; v += 2) {
    const auto exact = sb::oracle::count_perfect_matchings(v);
    counts = counts && std::llround(std::exp(md::matching_count_log(v))) == static_cast<long long>(exact);
  }
  c.expect(counts, "(v-1)!! equals enumerated matchings for v <= 14");
  return c.done();
}

Outcome detailed_balance() {
  Checks c;
  const auto& cp = md::critical_constants();
  double worst = 0.0;
  for (long n : {50L, 500L}) {
    worst = std::max(worst, sb::detailed_balance_defect(cw::magnetization_law(n), cw::transition_kernel(n)));
    worst = std::max(worst, sb::detailed_balance_defect(md::magnetization_law(n, cp.J_c, cp.h_c),
                                                        md::transition_kernel(n, cp.J_c, cp.h_c)));
  }
  c.expect(worst <= 1e-11, "max relative defect " + sci(worst) + " <= 1e-11");
  return c.done();
}

Outcome model_inequalities() {
  Checks c;
  long rem = 0, var = 0, mom = 0;
  double rem_c = 0.0, var_c = 0.0, mom_c = 0.0;
  for (long n : {50L, 100L, 400L, 1600L, 6400L}) {
    const auto diag = cw::pair_diagnostics(n);
    const auto r = cw::verify_remainder_bound(diag, n);
    const auto v = cw::verify_cond_var_bound(diag, n);
    rem += r.max_violation > 0.0;
    var += v.max_violation > 0.0;
    rem_c = std::max(rem_c, r.empirical_constant);
    var_c = std::max(var_c, v.empirical_constant);
    for (int p = 3; p <= 8; ++p) {
      const double ratio = cw::moment(n, p) / cw::moment_bound(p);
      mom += ratio > 1.0;
      mom_c = std::max(mom_c, ratio);
    }
  }
  c.expect(rem == 0, "remainder violations " + std::to_string(rem) + " (max lhs/rhs " + sci(rem_c) + ")");
  c.expect(var == 0, "variance violations " + std::to_string(var) + " (max lhs/rhs " + sci(var_c) + ")");
  c.expect(mom == 0, "moment violations " + std::to_string(mom) + " (max lhs/rhs " + sci(mom_c) + ")");
  return c.done();
}

Outcome rates() {
  Checks c;
  const std::vector<long> ns{100, 400, 1600, 6400, 25600};
  for (sb::Model model : {sb::Model::curie_weiss, sb::Model::monomer_dimer}) {
    const std::string name(sb::model_name(model));
    std::vector<sb::ModelSnapshot> snaps;
    for (long n : ns) snaps.push_back(sb::make_snapshot(model, n));
    std::vector<double> d;
    for (const auto& s : snaps) d.push_back(sb::theorem_audit(s, 0.0).profile.supremum);
    const auto fit = sb::rate_fit(ns, d);
    const bool cw_model = model == sb::Model::curie_weiss;
    const double lo = cw_model ? -0.65 : -0.40;
    const double hi = cw_model ? -0.40 : -0.15;
    c.expect(fit.slope >= lo && fit.slope <= hi,
             name + " p=0 slope " + sci(fit.slope) + " in [" + sci(lo) + ", " + sci(hi) + "]");
    for (double p : {3.0, 5.0}) {
      std::vector<double> k;
      for (std::size_t i = ns.size() - 3; i < ns.size(); ++i) k.push_back(sb::theorem_audit(snaps[i], p).implied_const_rate);
      const auto [mn, mx] = std::minmax_element(k.begin(), k.end());
      c.expect(*mx / *mn < 5.0, name + " p=" + sci(p) + " constant spread " + sci(*mx / *mn) + " < 5");
    }
  }
  return c.done();
}

Outcome truncation() {
  Checks c;
  bool zero = true;
  double worst = 0.0;
  for (long n : {50L, 100L, 400L, 1600L, 6400L}) {
    const double a = 2.0 / std::pow(static_cast<double>(n), 0.75);
    for (sb::Model model : {sb::Model::curie_weiss, sb::Model::monomer_dimer}) {
      const auto snap = sb::make_snapshot(model, n);
      const auto t = sb::bound_terms(snap.diag, snap.law_of_w, a);
      zero = zero && t.term_delta4 == 0.0 && t.uniform_variant_delta2 == 0.0;
      if (model == sb::Model::curie_weiss) worst = std::max(worst, std::abs(t.term_a3 - 8.0 * std::pow(n, -0.75)));
    }
  }
  c.expect(zero, "truncated Delta^4 and Delta^2 terms exactly 0 in both models");
  c.expect(worst <= 1e-14, "|a^3/lambda - 8 n^-3/4| max " + sci(worst) + " <= 1e-14");
  return c.done();
}

Outcome critical_point() {
  Checks c;
  const auto& cp = md::critical_constants();
  const double fixed = std::abs(md::g_fn(md::tau_fn(cp.m_c, cp.J_c, cp.h_c)) - cp.m_c);
  c.expect(fixed <= 1e-12, "|g(tau(m_c)) - m_c| " + sci(fixed));
  double low = 0.0;
  for (double d : cp.low_derivatives) low = std::max(low, std::abs(d));
  c.expect(low < 1e-6, "max |p~^(j)(m_c)|, j=1..3: " + sci(low));
  const auto& e = cp.fourth_derivative_estimates;
  double spread = 0.0;
  for (double v : e) spread = std::max(spread, std::abs(v - e[2]) / std::abs(e[2]));
  c.expect(e[0] < 0.0 && e[1] < 0.0 && e[2] < 0.0 && spread <= 1e-4,
           "p~''''(m_c) = " + sci(e[2]) + ", Richardson spread " + sci(spread));
  const double t1 = md::tail_concentration(200, 0.1);
  const double t2 = md::tail_concentration(400, 0.1);
  const double t3 = md::tail_concentration(800, 0.1);
  c.expect(t1 > t2 && t2 > t3 && t3 / t2 < t2 / t1,
           "tail " + sci(t1) + " > " + sci(t2) + " > " + sci(t3) + ", ratios " + sci(t2 / t1) + " > " + sci(t3 / t2));
  return c.done();
}

std::string run_full_audit(unsigned threads, const std::filesystem::path& dir) {
  std::string bytes;
  for (const char* model : {"curie-weiss", "monomer-dimer"}) {
    for (auto format : {sb::sweep::Format::csv, sb::sweep::Format::json}) {
      sb::sweep::SweepConfig cfg;
      cfg.model = model;
      cfg.ns = {100, 400, 1600, 6400, 25600};
      cfg.ps = {0.0, 3.0, 5.0};
      cfg.threads = threads;
      cfg.format = format;
      const std::string ext = format == sb::sweep::Format::csv ? ".csv" : ".json";
      cfg.out = (dir / (std::string(model) + "_t" + std::to_string(threads) + ext)).string();
      sb::sweep::emit(cfg, sb::sweep::run_audit(cfg));
      std::ifstream in(cfg.out, std::ios::binary);
      bytes += std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      if (format == sb::sweep::Format::csv) {
        const auto fits = dir / (std::string(model) + "_t" + std::to_string(threads) + ".fits.csv");
        std::ifstream f(fits, std::ios::binary);
        bytes += std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
      }
    }
  }
  return bytes;
}

Outcome determinism() {
  Checks c;
  const auto dir = std::filesystem::temp_directory_path() / ("steinbound_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string one = run_full_audit(1, dir);
  const std::string eight = run_full_audit(8, dir);
  std::filesystem::remove_all(dir);
  c.expect(!one.empty() && one == eight,
           "threads 1 vs 8: " + std::to_string(one.size()) + " bytes, " + (one == eight ? "identical" : "different"));
  return c.done();
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-10)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "Stein equation residual and solution bounds", 10.0, stein_equation},
      {2, "normalizer and moment closed forms", 5.0, closed_forms},
      {3, "Mills-type tail bound", 5.0, mills_bound},
      {4, "brute-force oracle equivalence", 60.0, oracle_equivalence},
      {5, "detailed balance of the pair kernels", 10.0, detailed_balance},
      {6, "remainder, variance and moment inequalities", 60.0, model_inequalities},
      {7, "rate reproduction at desk scale", 600.0, rates},
      {8, "truncation-term structure", 1e9, truncation},
      {9, "monomer-dimer critical point", 30.0, critical_point},
      {10, "thread-count determinism", 1e9, determinism},
  };

  int failed = 0;
  int ran = 0;
  for (const auto& crit : all) {
    if (only != 0 && crit.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > crit.budget_s) {
      out.passed = false;
      out.detail = "FAILED runtime " + sci(secs) + " s over budget " + sci(crit.budget_s) + " s; " + out.detail;
    }
    failed += !out.passed;
    std::printf("AC%-2d %s  %s [%.2f s] %s\n", crit.id, out.passed ? "PASS" : "FAIL", crit.title, secs,
                out.detail.c_str());
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  if (only == 0) std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
