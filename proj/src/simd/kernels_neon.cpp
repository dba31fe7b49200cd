#include "kernels_impl.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace mbgp::simd::detail {

#if defined(__aarch64__)

namespace {

void squared_distances_neon(const double* const* cols, std::size_t dims,
                            const double* point, std::size_t count, double* out) {
  std::size_t j = 0;
  for (; j + 2 <= count; j += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < dims; ++k) {
      const float64x2_t diff = vsubq_f64(vld1q_f64(cols[k] + j), vdupq_n_f64(point[k]));
      acc = vaddq_f64(acc, vmulq_f64(diff, diff));
    }
    vst1q_f64(out + j, acc);
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

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// No vector exp on this path yet; correlation stays on the scalar reference.
const Kernels kNeon{Isa::neon, squared_distances_neon, dot_neon,
                    sum_neon,  axpy_neon,              correlation_scalar};

} // namespace

const Kernels* neon_table() noexcept { return &kNeon; }

#else

const Kernels* neon_table() noexcept { return nullptr; }

#endif

} // namespace mbgp::simd::detail
