#include "steinbound/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace steinbound::kernels::scalar {

namespace {
constexpr std::size_t kLanes = 4;

double combine(const double (&lane)[kLanes]) {
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}
}  // namespace

double sum(std::span<const double> x) {
  double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = x.size() - x.size() % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) lane[l] += x[i + l];
  }
  double total = combine(lane);
  for (std::size_t i = body; i < x.size(); ++i) total += x[i];
  return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = x.size() < y.size() ? x.size() : y.size();
  const std::size_t body = n - n % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) lane[l] = std::fma(x[i + l], y[i + l], lane[l]);
  }
  double total = combine(lane);
  for (std::size_t i = body; i < n; ++i) total = std::fma(x[i], y[i], total);
  return total;
}

double max_element(std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : x) best = v > best ? v : best;
  return best;
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i] - shift);
}

double sum_exp_shifted(std::span<const double> x, double shift) {
  double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = x.size() - x.size() % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) lane[l] += std::exp(x[i + l] - shift);
  }
  double total = combine(lane);
  for (std::size_t i = body; i < x.size(); ++i) total += std::exp(x[i] - shift);
  return total;
}

}  // namespace steinbound::kernels::scalar
