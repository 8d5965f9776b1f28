#include "steinbound/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace steinbound::kernels {

namespace {

struct Table {
  double (*sum)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*max_element)(std::span<const double>);
  void (*exp_shifted)(std::span<const double>, double, std::span<double>);
  double (*sum_exp_shifted)(std::span<const double>, double);
};

constexpr Table kScalar{scalar::sum, scalar::dot, scalar::max_element, scalar::exp_shifted,
                        scalar::sum_exp_shifted};
constexpr Table kAvx2{avx2::sum, avx2::dot, avx2::max_element, avx2::exp_shifted,
                      avx2::sum_exp_shifted};

const Table& table_for(Isa isa) { return isa == Isa::avx2 ? kAvx2 : kScalar; }

std::atomic<const Table*>& active_table() {
  static std::atomic<const Table*> table{&table_for(detected_isa())};
  return table;
}

const Table& current() { return *active_table().load(std::memory_order_acquire); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa isa = avx2::available() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() noexcept { return &current() == &kAvx2 ? Isa::avx2 : Isa::scalar; }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2::available()) {
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                                "' is not available on this machine");
  }
  active_table().store(&table_for(isa), std::memory_order_release);
}

double sum(std::span<const double> x) { return current().sum(x); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  return current().dot(x, y);
}

double max_element(std::span<const double> x) { return current().max_element(x); }

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  if (x.size() != out.size()) throw std::invalid_argument("exp_shifted: length mismatch");
  current().exp_shifted(x, shift, out);
}

double sum_exp_shifted(std::span<const double> x, double shift) {
  return current().sum_exp_shifted(x, shift);
}

double log_sum_exp(std::span<const double> x) {
  const double top = max_element(x);
  if (!std::isfinite(top)) return top;  // empty, all -inf, or +inf present
  return top + std::log(sum_exp_shifted(x, top));
}

}  // namespace steinbound::kernels
