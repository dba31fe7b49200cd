#include <atomic>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"
#include "mbgp/error.hpp"

namespace mbgp {

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
  case KernelFamily::exponential: return "exponential";
  case KernelFamily::matern32: return "matern32";
  case KernelFamily::matern52: return "matern52";
  case KernelFamily::gaussian: return "gaussian";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "matern32" || name == "matern-3/2") return KernelFamily::matern32;
  if (name == "matern52" || name == "matern-5/2") return KernelFamily::matern52;
  if (name == "gaussian") return KernelFamily::gaussian;
  throw InputError("unknown kernel family '" + std::string(name) + "'");
}

namespace simd {

namespace {

const Kernels kScalar{Isa::scalar,        detail::squared_distances_scalar,
                      detail::dot_scalar, detail::sum_scalar,
                      detail::axpy_scalar, detail::correlation_scalar};

const Kernels* table_for(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar: return &kScalar;
  case Isa::avx2: return detail::avx2_table();
  case Isa::neon: return detail::neon_table();
  }
  return nullptr;
}

std::atomic<const Kernels*>& current() noexcept {
  static std::atomic<const Kernels*> table{table_for(best_available())};
  return table;
}

} // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar: return "scalar";
  case Isa::avx2: return "avx2";
  case Isa::neon: return "neon";
  }
  return "unknown";
}

const Kernels& scalar_kernels() noexcept { return kScalar; }
const Kernels* avx2_kernels() noexcept { return detail::avx2_table(); }
const Kernels* neon_kernels() noexcept { return detail::neon_table(); }

Isa best_available() noexcept {
  if (detail::avx2_table() != nullptr) return Isa::avx2;
  if (detail::neon_table() != nullptr) return Isa::neon;
  return Isa::scalar;
}

const Kernels& active() noexcept { return *current().load(std::memory_order_acquire); }

bool set_active(Isa isa) noexcept {
  const Kernels* table = table_for(isa);
  if (table == nullptr) return false;
  current().store(table, std::memory_order_release);
  return true;
}

} // namespace simd
} // namespace mbgp
