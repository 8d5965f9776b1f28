#pragma once

// Data-parallel reduction kernels used by the exact-law and metric code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is picked once at first use from the CPU features and
// can be pinned with set_isa() (tests use this to compare the two paths).
//
// Summation order is fixed: four interleaved lanes (element i goes to lane
// i mod 4), lanes combined as (l0 + l2) + (l1 + l3), remainder added in index
// order. The scalar reference follows the same order and uses std::fma for
// dot products, so sum/dot/max are bit-identical across variants. exp_shifted
// differs by at most a few ulp (the AVX2 path uses its own polynomial exp).

#include <span>
#include <string_view>

namespace steinbound::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best variant the running CPU supports (and this build contains).
Isa detected_isa() noexcept;

/// Variant currently used by the dispatching entry points.
Isa active_isa() noexcept;

/// Pins the dispatch target. Throws std::invalid_argument if the requested
/// variant is not available on this CPU or in this build.
void set_isa(Isa isa);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// Largest element; -inf for an empty span. NaNs are not expected.
double max_element(std::span<const double> x);

/// out[i] = exp(x[i] - shift). Results below the smallest subnormal are
/// flushed to exactly 0; -inf inputs give 0. out.size() must equal x.size().
void exp_shifted(std::span<const double> x, double shift, std::span<double> out);

/// sum_i exp(x[i] - shift), in the fixed lane order.
double sum_exp_shifted(std::span<const double> x, double shift);

/// log(sum_i exp(x[i])); -inf when the span is empty or all entries are -inf.
double log_sum_exp(std::span<const double> x);

// Direct access to the individual variants, for equivalence tests and
// benchmarks. The avx2 namespace is only usable when detected_isa() == avx2.
namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_element(std::span<const double> x);
void exp_shifted(std::span<const double> x, double shift, std::span<double> out);
double sum_exp_shifted(std::span<const double> x, double shift);
}  // namespace scalar

namespace avx2 {
bool available() noexcept;
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_element(std::span<const double> x);
void exp_shifted(std::span<const double> x, double shift, std::span<double> out);
double sum_exp_shifted(std::span<const double> x, double shift);
}  // namespace avx2

}  // namespace steinbound::kernels
