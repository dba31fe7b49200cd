#include "kernels_impl.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define MBGP_HAVE_AVX2_VARIANT 1
#include <immintrin.h>
#endif

namespace mbgp::simd::detail {

#if defined(MBGP_HAVE_AVX2_VARIANT)

#define MBGP_AVX2 __attribute__((target("avx2,fma")))

namespace {

MBGP_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Cephes-style exp: range reduction by ln 2 in two parts, then a (3,4) Pade
// form. Inputs below -708 flush to zero.
MBGP_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_floor_pd(
      _mm256_fmadd_pd(x, _mm256_set1_pd(1.4426950408889634073599), _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^fx through the exponent field; fx lies in [-1022, 1023].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0); // 2^52 + 2^51
  __m256i n = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(fx, magic)),
                               _mm256_castpd_si256(magic));
  n = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n));
  return _mm256_andnot_pd(underflow, r);
}

MBGP_AVX2 void squared_distances_avx2(const double* const* cols, std::size_t dims,
                                      const double* point, std::size_t count,
                                      double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dims; ++k) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_loadu_pd(cols[k] + j), _mm256_set1_pd(point[k]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < count; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dims; ++k) {
      const double diff = cols[k][j] - point[k];
      acc += diff * diff;
    }
    out[j] = acc;
  }
}

MBGP_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

MBGP_AVX2 double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

MBGP_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

MBGP_AVX2 void correlation_avx2(KernelFamily family, const double* dist, std::size_t n,
                                double inv_phi, double* out) {
  const __m256d scale = _mm256_set1_pd(inv_phi);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(dist + i), scale);
    __m256d r;
    switch (family) {
    case KernelFamily::exponential:
      r = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), t));
      break;
    case KernelFamily::gaussian:
      r = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(t, t)));
      break;
    case KernelFamily::matern32: {
      const __m256d u = _mm256_mul_pd(t, _mm256_set1_pd(kSqrt3));
      r = _mm256_mul_pd(_mm256_add_pd(one, u), exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), u)));
      break;
    }
    case KernelFamily::matern52:
    default: {
      const __m256d u = _mm256_mul_pd(t, _mm256_set1_pd(kSqrt5));
      const __m256d poly = _mm256_add_pd(
          _mm256_add_pd(one, u), _mm256_div_pd(_mm256_mul_pd(u, u), _mm256_set1_pd(3.0)));
      r = _mm256_mul_pd(poly, exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), u)));
      break;
    }
    }
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = correlation_one(family, dist[i] * inv_phi);
}

const Kernels kAvx2{Isa::avx2,       squared_distances_avx2, dot_avx2,
                    sum_avx2,        axpy_avx2,              correlation_avx2};

} // namespace

const Kernels* avx2_table() noexcept {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

#else

const Kernels* avx2_table() noexcept { return nullptr; }

#endif

} // namespace mbgp::simd::detail
