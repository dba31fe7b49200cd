#include <cmath>

#include "kernels_impl.hpp"

namespace mbgp::simd::detail {

void squared_distances_scalar(const double* const* cols, std::size_t dims,
                              const double* point, std::size_t count,
                              double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dims; ++k) {
      const double diff = cols[k][j] - point[k];
      acc += diff * diff;
    }
    out[j] = acc;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double correlation_one(KernelFamily family, double t) {
  switch (family) {
  case KernelFamily::exponential:
    return std::exp(-t);
  case KernelFamily::gaussian:
    return std::exp(-t * t);
  case KernelFamily::matern32: {
    const double u = kSqrt3 * t;
    return (1.0 + u) * std::exp(-u);
  }
  case KernelFamily::matern52: {
    const double u = kSqrt5 * t;
    return (1.0 + u + u * u / 3.0) * std::exp(-u);
  }
  }
  return 0.0;
}

void correlation_scalar(KernelFamily family, const double* dist, std::size_t n,
                        double inv_phi, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = correlation_one(family, dist[i] * inv_phi);
}

} // namespace mbgp::simd::detail
