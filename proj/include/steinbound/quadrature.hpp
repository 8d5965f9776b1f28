#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//
// Global subdivision in the QUADPACK QAG style: the interval with the largest
// error estimate is bisected until the summed estimate drops below
// max(abs_tol, rel_tol * |value|) or the subdivision budget is spent.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace steinbound::quadrature {

struct Tolerance {
  double abs = 1e-13;
  double rel = 1e-11;
  int max_subdivisions = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the 7-point rule, paired with the odd Kronrod nodes.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Single 15-point Kronrod panel with its embedded Gauss error estimate.
template <class F>
Result gauss_kronrod15(F&& f, double lo, double hi) {
  const detail::Panel p = detail::gk15(f, lo, hi);
  return {p.value, p.error, 15, true};
}

template <class F>
Result integrate(F&& f, double lo, double hi, const Tolerance& tol = {}) {
  if (lo == hi) return {};
  if (hi < lo) {
    Result r = integrate(f, hi, lo, tol);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gk15(f, lo, hi));
  double value = panels.top().value;
  double error = panels.top().error;
  int evaluations = 15;
  int splits = 0;
  while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (splits >= tol.max_subdivisions) {
      return {value, error, evaluations, false};
    }
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) break;  // interval at machine resolution
    panels.pop();
    const detail::Panel left = detail::gk15(f, worst.lo, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    evaluations += 30;
    ++splits;
  }
  // Re-sum from the panels so the running-update drift does not leak out.
  double total = 0.0;
  double total_error = 0.0;
  std::vector<detail::Panel> rest;
  rest.reserve(panels.size());
  while (!panels.empty()) {
    rest.push_back(panels.top());
    panels.pop();
  }
  std::sort(rest.begin(), rest.end(),
            [](const detail::Panel& a, const detail::Panel& b) { return a.lo < b.lo; });
  for (const auto& p : rest) {
    total += p.value;
    total_error += p.error;
  }
  return {total, total_error, evaluations, true};
}

}  // namespace steinbound::quadrature
