#include "mbgp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mbgp/error.hpp"
#include "mbgp/neighbors.hpp"
#include "mbgp/vecchia.hpp"

namespace mbgp {

void SimulationConfig::validate() const {
  require(n >= 2, "simulation needs n >= 2");
  require(beta.size() >= 1 && beta.allFinite(), "simulation needs a finite beta with at least an intercept");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "sigma2 must be positive");
  require(omega >= 0.0 && omega <= 1.0, "omega must lie in [0, 1]");
  require(phi > 0.0 && std::isfinite(phi), "phi must be positive");
  require(dims >= 1, "dims must be at least 1");
  require(test_fraction >= 0.0 && test_fraction < 1.0, "test fraction must lie in [0, 1)");
  require(sim_neighbors >= 1, "simulation neighbor count must be at least 1");
}

SpatialDataset simulate_dataset(const SimulationConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);

  const auto n = static_cast<Eigen::Index>(config.n);
  const auto d = static_cast<Eigen::Index>(config.dims);
  const Eigen::Index ncoef = config.beta.size();
  SpatialDataset data;
  data.locations.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) data.locations(i, k) = unif(rng);
  data.X.resize(n, ncoef);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < ncoef; ++k) data.X(i, k) = z(rng);
  }
  Eigen::VectorXd noise(n);
  for (Eigen::Index i = 0; i < n; ++i) noise(i) = z(rng);
  const Eigen::VectorXd mean = data.X * config.beta;

  if (config.n <= kDenseSimulationLimit) {
    Eigen::MatrixXd R = correlation_matrix(data.locations, config.omega, config.phi, config.family);
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) {
      R.diagonal().array() += 1e-10;
      llt.compute(R);
      if (llt.info() != Eigen::Success) throw NumericalError("simulation covariance is not positive definite");
    }
    const Eigen::VectorXd field = llt.matrixL() * noise;
    data.y = mean + std::sqrt(config.sigma2) * field;
  } else {
    // Sequential draw y_i | y_{N(i)} in the generated (already random) order.
    // The cache only needs the weights and variances, which do not involve y.
    SpatialDataset shell = data;
    shell.y = Eigen::VectorXd::Zero(n);
    const auto graph = build_neighbor_sets(data.locations, config.sim_neighbors);
    KernelSpec kernel{config.family, std::min(config.phi, 1e-3), std::max(config.phi, 1.0)};
    ConditionalCache cache(shell, graph, kernel);
    cache.reset(std::min(config.omega, std::nextafter(1.0, 0.0)), config.phi);
    cache.ensure_all();
    data.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto nb = graph.of(static_cast<std::size_t>(i));
      const auto b = cache.weights(static_cast<std::size_t>(i));
      double mu = mean(i);
      for (std::size_t t = 0; t < nb.size(); ++t) mu += b[t] * (data.y(nb[t]) - mean(nb[t]));
      data.y(i) = mu + std::sqrt(config.sigma2 * cache.v(static_cast<std::size_t>(i))) * noise(i);
    }
  }

  const auto n_test = static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(config.n)));
  std::vector<std::size_t> order(config.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  data.split.assign(config.n, Split::train);
  for (std::size_t k = 0; k < n_test; ++k) data.split[order[k]] = Split::test;
  return data;
}

} // namespace mbgp
