#pragma once

#include <string_view>

namespace mbgp {

/// Isotropic correlation families. Matern variants use the closed forms at
/// smoothness 3/2 and 5/2.
enum class KernelFamily { exponential, matern32, matern52, gaussian };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

} // namespace mbgp
