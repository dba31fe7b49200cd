#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/gibbs.hpp"
#include "mbgp/model.hpp"
#include "mbgp/neighbors.hpp"
#include "mbgp/predict.hpp"

namespace mbgp::testkit {

/// Uniform locations on the unit square (or cube), intercept plus normal
/// covariates, standard-normal responses.
SpatialDataset random_dataset(std::size_t n, std::size_t covariates, std::uint64_t seed, std::size_t dims = 2);

/// Same layout with a Gaussian-process response (dense draw).
SpatialDataset gp_dataset(std::size_t n, const Eigen::VectorXd& beta, double sigma2, double omega, double phi,
                          std::uint64_t seed, KernelFamily family = KernelFamily::exponential);

/// Neighbor graph that conditions each position on all earlier ones.
NeighborGraph full_graph(const SpatialDataset& data);

/// Complete conditional of beta_p from the dense covariance.
NormalConditional dense_beta_conditional(const SpatialDataset& data, std::size_t p, const Eigen::VectorXd& beta,
                                         double sigma2, double omega, double phi, KernelFamily family,
                                         const PriorSpec::Normal& prior);

/// Exact posterior over a discrete (omega, phi) grid, row-major in
/// (omega index, phi index), with beta integrated analytically and sigma2 by
/// quadrature. Uses the dense likelihood.
std::vector<double> enumerate_theta_posterior(const SpatialDataset& data, const PriorSpec& prior,
                                              const KernelSpec& kernel);

/// Same, with beta and sigma2 held fixed.
std::vector<double> enumerate_theta_posterior_fixed(const SpatialDataset& data, const PriorSpec& prior,
                                                    const KernelSpec& kernel, const Eigen::VectorXd& beta,
                                                    double sigma2);

/// Empirical PMF of (omega, phi) draws over the prior grid.
std::vector<double> grid_pmf(const std::vector<double>& omegas, const std::vector<double>& phis,
                             const PriorSpec& prior);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

/// Dense simple-kriging conditional at a point given every training row.
Kriging dense_kriging(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& x0, const SpatialDataset& train,
                      const GpParams& params, KernelFamily family);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v); // denominator n - 1

} // namespace mbgp::testkit
