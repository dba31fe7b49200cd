#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "mbgp/model.hpp"

namespace mbgp {

struct SimulationConfig {
  std::size_t n = 2000;
  Eigen::VectorXd beta = Eigen::Vector3d(0.0, 1.0, -5.0);
  double sigma2 = 1.0;
  double omega = 0.5;
  double phi = 0.236;
  KernelFamily family = KernelFamily::exponential;
  std::size_t dims = 2;
  double test_fraction = 0.2;
  std::size_t sim_neighbors = 30; // used above the dense limit
  std::uint64_t seed = 1;

  void validate() const;
};

/// Largest n simulated with an exact dense Cholesky draw.
inline constexpr std::size_t kDenseSimulationLimit = 4000;

/// Locations uniform on the unit cube, an intercept plus standard-normal
/// covariates, and a Gaussian-process response. Exact for n <= 4000,
/// otherwise drawn sequentially through the nearest-neighbor factorization.
SpatialDataset simulate_dataset(const SimulationConfig& config);

} // namespace mbgp
