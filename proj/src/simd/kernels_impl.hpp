#pragma once

#include <cstddef>

#include "mbgp/kernel_family.hpp"
#include "mbgp/simd.hpp"

namespace mbgp::simd::detail {

inline constexpr double kSqrt3 = 1.7320508075688772935274463415059;
inline constexpr double kSqrt5 = 2.2360679774997896964091736687313;

double correlation_one(KernelFamily family, double t);

void squared_distances_scalar(const double* const* cols, std::size_t dims,
                              const double* point, std::size_t count, double* out);
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void correlation_scalar(KernelFamily family, const double* dist, std::size_t n,
                        double inv_phi, double* out);

// Defined only when the target supports the variant; callers go through
// avx2_table()/neon_table(), which return null otherwise.
const Kernels* avx2_table() noexcept;
const Kernels* neon_table() noexcept;

} // namespace mbgp::simd::detail
