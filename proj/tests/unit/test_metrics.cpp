#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "steinbound/curie_weiss.hpp"
#include "steinbound/errors.hpp"
#include "steinbound/metrics.hpp"
#include "steinbound/monomer_dimer.hpp"
#include "steinbound/oracle.hpp"

using namespace steinbound;

namespace {

DiscreteLaw uniform_atoms(std::vector<double> xs) {
  std::vector<double> weights(xs.size(), 0.0);
  return DiscreteLaw::from_log_weights(std::move(xs), std::move(weights));
}

// max over atoms of both one-sided gaps, the classical Kolmogorov scan. Uses
// 1 - cdf on the upper side, so it only matches to rounding.
double direct_scan(const DiscreteLaw& disc, const LimitLaw& law) {
  double best = 0.0;
  for (std::size_t i = 0; i < disc.size(); ++i) {
    const double f = law.cdf(disc.locations()[i]);
    const double before = i == 0 ? 0.0 : disc.cumulative(i - 1);
    best = std::max({best, std::abs(disc.cumulative(i) - f), std::abs(before - f)});
  }
  return best;
}

}  // namespace

TEST_CASE("unit mass at the origin is half a jump from the normal law") {
  const auto disc = uniform_atoms({0.0});
  const auto prof = weighted_distance(disc, LimitLaw(1, 0.5), 0.0);
  CHECK(prof.supremum == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(prof.argsup == 0.0);
  // With weight the supremum moves off the atom into an interior point.
  const auto weighted = weighted_distance(disc, LimitLaw(1, 0.5), 3.0);
  CHECK(weighted.supremum > 0.5);
  CHECK(std::abs(weighted.argsup) > 0.0);
}

TEST_CASE("self-distance of a fine quantile discretization") {
  const std::size_t n = 1'000'000;
  std::vector<double> xs(n);
  // Midpoint quantiles of the standard normal from the inverse error function.
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    xs[i] = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
  }
  const auto disc = uniform_atoms(std::move(xs));
  const auto prof = weighted_distance(disc, LimitLaw(1, 0.5), 0.0, {.interior_grid = 0, .keep_records = false});
  CHECK(prof.supremum <= 1e-6);
  CHECK(prof.supremum == doctest::Approx(0.5 / n).epsilon(1e-6));
}

TEST_CASE("p = 0 equals a direct scan at the atoms") {
  const auto law = curie_weiss::critical_limit_law();
  for (long n : {10L, 100L, 1000L}) {
    const auto disc = curie_weiss::w_law(n);
    CHECK(weighted_distance(disc, law, 0.0).supremum == doctest::Approx(direct_scan(disc, law)).epsilon(1e-12));
  }
  const auto md_disc = monomer_dimer::w_law(500);
  const auto md_law = monomer_dimer::critical_limit_law();
  CHECK(weighted_distance(md_disc, md_law, 0.0).supremum ==
        doctest::Approx(direct_scan(md_disc, md_law)).epsilon(1e-12));
}

TEST_CASE("profile structure") {
  const auto disc = curie_weiss::w_law(400);
  const auto law = curie_weiss::critical_limit_law();
  const auto prof = weighted_distance(disc, law, 3.0);
  REQUIRE(!prof.records.empty());
  double best = 0.0;
  for (const auto& r : prof.records) {
    CHECK(r.weighted == doctest::Approx(std::pow(1.0 + std::abs(r.z), 3.0) * r.gap).epsilon(1e-14));
    CHECK(std::abs(r.z) <= prof.z_cut);
    best = std::max(best, r.weighted);
  }
  CHECK(prof.supremum == best);
  const double at_zero = std::abs(disc.cdf(0.0) - 0.5);
  CHECK(prof.supremum >= at_zero);
  CHECK(prof.z_cut > 0.0);
  // Beyond the cutoff the limit law's weighted tail is negligible.
  CHECK(std::pow(1.0 + prof.z_cut, 3.0) * law.tail_bound(prof.z_cut) < 1e-16);
}

TEST_CASE("supremum is nondecreasing in p") {
  const auto disc = monomer_dimer::w_law(1000);
  const auto law = monomer_dimer::critical_limit_law();
  double prev = 0.0;
  for (double p : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
    const double s = weighted_distance(disc, law, p, {.interior_grid = 0, .keep_records = false}).supremum;
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("sup search is complete under grid refinement") {
  for (Model model : {Model::curie_weiss, Model::monomer_dimer}) {
    for (long n : {100L, 1600L}) {
      const auto snap = make_snapshot(model, n);
      for (double p : {0.0, 3.0, 5.0}) {
        const double base = theorem_audit(snap, p).profile.supremum;
        const double g8 = theorem_audit(snap, p, std::nullopt, {.interior_grid = 8, .keep_records = false}).profile.supremum;
        const double g16 = theorem_audit(snap, p, std::nullopt, {.interior_grid = 16, .keep_records = false}).profile.supremum;
        CAPTURE(n);
        CAPTURE(p);
        CHECK(std::abs(g16 - g8) < 1e-9);
        CHECK(std::abs(g16 - base) < 1e-9);
        CHECK(base >= g16 - 1e-15);
      }
    }
  }
}

TEST_CASE("distance validation") {
  const auto disc = uniform_atoms({0.0, 1.0});
  CHECK_THROWS_AS(weighted_distance(disc, LimitLaw(1, 0.5), -1.0), InvalidParameter);
}

TEST_CASE("rate fit") {
  const std::vector<long> ns{100, 1000, 10000, 100000};
  std::vector<double> d;
  for (long n : ns) d.push_back(7.0 * std::pow(n, -0.5));
  const auto exact = rate_fit(ns, d);
  CHECK(std::abs(exact.slope + 0.5) < 1e-12);
  CHECK(std::abs(exact.intercept - std::log(7.0)) < 1e-11);
  CHECK(exact.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact.target_slope == exact.slope);

  const auto with_target = rate_fit(ns, d, -0.5);
  CHECK(with_target.empirical_constant == doctest::Approx(7.0).epsilon(1e-12));

  const std::vector<double> flat(ns.size(), 0.3);
  const auto constant = rate_fit(ns, flat);
  CHECK(std::abs(constant.slope) < 1e-15);
  CHECK(constant.r_squared == 1.0);

  const std::vector<long> wide{100, 1000, 10000, 100000};
  std::vector<double> synth;
  for (long n : wide) synth.push_back(std::pow(n, -0.25) * (1.0 + 0.1 / std::log(static_cast<double>(n))));
  const auto s = rate_fit(wide, synth);
  CHECK(std::abs(s.slope + 0.25) < 0.05);
  CHECK(s.r_squared >= 0.0);
  CHECK(s.r_squared <= 1.0);

  CHECK_THROWS_AS(rate_fit(std::vector<long>{1, 2}, std::vector<double>{1.0, 2.0}), InvalidParameter);
  CHECK_THROWS_AS(rate_fit(std::vector<long>{1, 2, 3}, std::vector<double>{1.0, 2.0}), InvalidParameter);
  CHECK_THROWS_AS(rate_fit(std::vector<long>{1, 2, 3}, std::vector<double>{1.0, 0.0, 2.0}), InvalidParameter);
}

TEST_CASE("truncation terms vanish at the jump size") {
  for (long n : {50L, 400L, 6400L}) {
    const auto cw = make_snapshot(Model::curie_weiss, n);
    const double a = 2.0 / std::pow(n, 0.75);
    const auto t = bound_terms(cw.diag, cw.law_of_w, a);
    CHECK(t.term_delta4 == 0.0);
    CHECK(t.uniform_variant_delta2 == 0.0);
    CHECK(t.term_a == a);
    CHECK(std::abs(t.term_a3 - 8.0 * std::pow(n, -0.75)) <= 1e-14);
    CHECK(t.term_condvar >= 0.0);
    CHECK(t.term_remainder >= 0.0);
    CHECK(t.nonuniform_sum() == doctest::Approx(t.term_condvar + t.term_remainder + t.term_a + t.term_a3));

    const auto md = make_snapshot(Model::monomer_dimer, n);
    const auto m = bound_terms(md.diag, md.law_of_w, md.diag.delta_support_bound);
    CHECK(m.term_delta4 == 0.0);
    CHECK(m.uniform_variant_delta2 == 0.0);
    // Just below the jump the truncated terms switch on.
    const auto below = bound_terms(md.diag, md.law_of_w, 0.5 * md.diag.delta_support_bound);
    CHECK(below.term_delta4 > 0.0);
    CHECK(below.uniform_variant_delta2 > 0.0);
  }
}

TEST_CASE("bound terms match the enumeration oracle") {
  for (long n = 2; n <= 12; ++n) {
    const auto snap = make_snapshot(Model::curie_weiss, n);
    for (double scale : {0.5, 1.0, 3.0}) {
      const auto e = oracle::enumerate_curie_weiss(n, 1.0, scale * snap.diag.delta_support_bound);
      const auto want = oracle::enumerated_bound_terms(e);
      const auto got = bound_terms(snap.diag, snap.law_of_w, e.a);
      CAPTURE(n);
      CAPTURE(scale);
      CHECK(got.term_condvar == doctest::Approx(want.term_condvar).epsilon(1e-11));
      CHECK(got.term_remainder == doctest::Approx(want.term_remainder).epsilon(1e-11));
      CHECK(got.term_a3 == doctest::Approx(want.term_a3).epsilon(1e-11));
      CHECK(got.term_delta4 == doctest::Approx(want.term_delta4).epsilon(1e-11));
      CHECK(got.uniform_variant_delta2 == doctest::Approx(want.uniform_variant_delta2).epsilon(1e-11));
    }
  }
  for (long n : {2L, 4L, 6L, 8L, 10L}) {
    const auto snap = make_snapshot(Model::monomer_dimer, n);
    const auto e = oracle::enumerate_monomer_dimer(n, 0.5 * snap.diag.delta_support_bound);
    const auto want = oracle::enumerated_bound_terms(e);
    const auto got = bound_terms(snap.diag, snap.law_of_w, e.a);
    CHECK(got.term_condvar == doctest::Approx(want.term_condvar).epsilon(1e-11));
    CHECK(got.term_remainder == doctest::Approx(want.term_remainder).epsilon(1e-11));
    CHECK(got.term_delta4 == doctest::Approx(want.term_delta4).epsilon(1e-11));
  }
}

TEST_CASE("bound terms reject mismatched atoms and bad truncation") {
  const auto six = make_snapshot(Model::curie_weiss, 6);
  const auto seven = make_snapshot(Model::curie_weiss, 7);
  CHECK_THROWS_AS(bound_terms(six.diag, seven.law_of_w, 0.1), InvalidParameter);
  CHECK_THROWS_AS(bound_terms(six.diag, six.law_of_w, 0.0), InvalidParameter);
}

TEST_CASE("model names") {
  CHECK(parse_model("curie-weiss") == Model::curie_weiss);
  CHECK(parse_model("curie_weiss") == Model::curie_weiss);
  CHECK(parse_model("monomer-dimer") == Model::monomer_dimer);
  CHECK(parse_model("monomer_dimer") == Model::monomer_dimer);
  CHECK(model_name(Model::monomer_dimer) == "monomer-dimer");
  CHECK_THROWS_AS(parse_model("ising"), InvalidParameter);
}

TEST_CASE("audit normalization and stability of implied constants") {
  for (Model model : {Model::curie_weiss, Model::monomer_dimer}) {
    const double rate = model == Model::curie_weiss ? 0.5 : 0.25;
    for (double p : {3.0, 5.0}) {
      std::vector<double> c;
      for (long n : {400L, 1600L, 6400L}) {
        const auto r = theorem_audit(model, n, p);
        CHECK(r.terms.a_used == doctest::Approx(2.0 / std::pow(n, 0.75)).epsilon(1e-15));
        CHECK(r.implied_const_rate == doctest::Approx(r.profile.supremum * std::pow(n, rate)).epsilon(1e-14));
        CHECK(r.implied_const_papernorm == doctest::Approx(r.implied_const_rate / std::pow(p, p / 2)).epsilon(1e-14));
        c.push_back(r.implied_const_rate);
      }
      const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
      CHECK(*hi / *lo < 5.0);
    }
  }
}
