// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless available() is true.

#include "steinbound/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#if defined(STEINBOUND_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace steinbound::kernels::avx2 {

#if defined(STEINBOUND_HAVE_AVX2)

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);  // (l0 + l2, l1 + l3)
  return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

// 2^k for integral-valued k in [-600, 600], built directly in the exponent.
__m256d pow2(__m256d k) {
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), magic);
  const __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(biased), _mm256_castpd_si256(magic));
  return _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
}

// exp(x) with Cody-Waite reduction x = k ln2 + r, |r| <= ln2/2, and a
// degree-13 Taylor polynomial for exp(r). The 2^k scaling is split in two
// factors so subnormal results come out right.
__m256d exp4(__m256d x) {
  const __m256d underflow = _mm256_set1_pd(-745.14);
  const __m256d zero_mask = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
  x = _mm256_max_pd(x, underflow);
  x = _mm256_min_pd(x, _mm256_set1_pd(709.78));

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.5)));
  const __m256d k2 = _mm256_sub_pd(k, k1);
  const __m256d y = _mm256_mul_pd(_mm256_mul_pd(p, pow2(k1)), pow2(k2));
  return _mm256_blendv_pd(y, _mm256_setzero_pd(), zero_mask);
}

}  // namespace

bool available() noexcept {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

double sum(std::span<const double> x) {
  const std::size_t body = x.size() - x.size() % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double total = hsum(acc);
  for (std::size_t i = body; i < x.size(); ++i) total += x[i];
  return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() < y.size() ? x.size() : y.size();
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc);
  }
  double total = hsum(acc);
  for (std::size_t i = body; i < n; ++i) total = std::fma(x[i], y[i], total);
  return total;
}

double max_element(std::span<const double> x) {
  const std::size_t body = x.size() - x.size() % 4;
  __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < body; i += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(x.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double out = lanes[0];
  for (int l = 1; l < 4; ++l) out = lanes[l] > out ? lanes[l] : out;
  for (std::size_t i = body; i < x.size(); ++i) out = x[i] > out ? x[i] : out;
  return out;
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  const std::size_t body = x.size() - x.size() % 4;
  const __m256d s = _mm256_set1_pd(shift);
  for (std::size_t i = 0; i < body; i += 4) {
    _mm256_storeu_pd(out.data() + i, exp4(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), s)));
  }
  if (body < x.size()) {
    alignas(32) double in[4] = {-INFINITY, -INFINITY, -INFINITY, -INFINITY};
    alignas(32) double res[4];
    for (std::size_t i = body; i < x.size(); ++i) in[i - body] = x[i];
    _mm256_store_pd(res, exp4(_mm256_sub_pd(_mm256_load_pd(in), s)));
    for (std::size_t i = body; i < x.size(); ++i) out[i] = res[i - body];
  }
}

double sum_exp_shifted(std::span<const double> x, double shift) {
  const std::size_t body = x.size() - x.size() % 4;
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    acc = _mm256_add_pd(acc, exp4(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), s)));
  }
  double total = hsum(acc);
  if (body < x.size()) {
    alignas(32) double in[4] = {-INFINITY, -INFINITY, -INFINITY, -INFINITY};
    alignas(32) double res[4];
    for (std::size_t i = body; i < x.size(); ++i) in[i - body] = x[i];
    _mm256_store_pd(res, exp4(_mm256_sub_pd(_mm256_load_pd(in), s)));
    for (std::size_t i = body; i < x.size(); ++i) total += res[i - body];
  }
  return total;
}

#else  // !STEINBOUND_HAVE_AVX2

bool available() noexcept { return false; }
double sum(std::span<const double> x) { return scalar::sum(x); }
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
double max_element(std::span<const double> x) { return scalar::max_element(x); }
void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  scalar::exp_shifted(x, shift, out);
}
double sum_exp_shifted(std::span<const double> x, double shift) {
  return scalar::sum_exp_shifted(x, shift);
}

#endif

}  // namespace steinbound::kernels::avx2
