#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; vector variants (AVX2 on x86-64, NEON on aarch64) are picked
// at runtime from what the CPU reports and are equivalence-tested against the
// reference.

#include <cstddef>
#include <span>
#include <string_view>

#include "mbgp/kernel_family.hpp"

namespace mbgp::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

struct Kernels {
  Isa isa;

  // out[j] = sum_k (cols[k][j] - point[k])^2 for j < count. Coordinates are
  // stored one contiguous column per dimension. Results are bitwise identical
  // across ISAs (no fused multiply-add, same per-lane operation order).
  void (*squared_distances)(const double* const* cols, std::size_t dims,
                            const double* point, std::size_t count,
                            double* out);

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // out[j] = rho(dist[j] * inv_phi) for the given family.
  void (*correlation)(KernelFamily family, const double* dist, std::size_t n,
                      double inv_phi, double* out);
};

const Kernels& scalar_kernels() noexcept;

/// Null when the variant is not compiled for this target or the running CPU
/// lacks the instructions.
const Kernels* avx2_kernels() noexcept;
const Kernels* neon_kernels() noexcept;

/// Widest variant the running CPU supports.
Isa best_available() noexcept;

/// Kernels used by the library.
const Kernels& active() noexcept;

/// Switches the dispatched variant; returns false (and changes nothing) when
/// the requested ISA is unavailable.
bool set_active(Isa isa) noexcept;

// Convenience wrappers over active().
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) {
  return active().sum(a.data(), a.size());
}

} // namespace mbgp::simd
