#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mbgp/simulate.hpp"

namespace mbgp::testkit {

SpatialDataset random_dataset(std::size_t n, std::size_t covariates, std::uint64_t seed, std::size_t dims) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  SpatialDataset d;
  const auto nn = static_cast<Eigen::Index>(n);
  d.locations.resize(nn, static_cast<Eigen::Index>(dims));
  d.X.resize(nn, static_cast<Eigen::Index>(covariates + 1));
  d.y.resize(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index k = 0; k < d.locations.cols(); ++k) d.locations(i, k) = u(rng);
    d.X(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < d.X.cols(); ++k) d.X(i, k) = z(rng);
    d.y(i) = z(rng);
  }
  return d;
}

SpatialDataset gp_dataset(std::size_t n, const Eigen::VectorXd& beta, double sigma2, double omega, double phi,
                          std::uint64_t seed, KernelFamily family) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.beta = beta;
  cfg.sigma2 = sigma2;
  cfg.omega = omega;
  cfg.phi = phi;
  cfg.family = family;
  cfg.test_fraction = 0.0;
  cfg.seed = seed;
  return simulate_dataset(cfg);
}

NeighborGraph full_graph(const SpatialDataset& data) {
  return build_neighbor_sets(data.locations, std::max<std::size_t>(1, data.size() - 1));
}

NormalConditional dense_beta_conditional(const SpatialDataset& data, std::size_t p, const Eigen::VectorXd& beta,
                                         double sigma2, double omega, double phi, KernelFamily family,
                                         const PriorSpec::Normal& prior) {
  const Eigen::MatrixXd R = correlation_matrix(data.locations, omega, phi, family);
  const Eigen::LLT<Eigen::MatrixXd> llt(R);
  const auto pp = static_cast<Eigen::Index>(p);
  Eigen::VectorXd others = beta;
  others(pp) = 0.0;
  const Eigen::VectorXd resid = data.y - data.X * others;
  const Eigen::VectorXd xp = data.X.col(pp);
  const Eigen::VectorXd rinv_xp = llt.solve(xp);
  const double precision = xp.dot(rinv_xp) / sigma2 + 1.0 / prior.var;
  const double var = 1.0 / precision;
  return {var * (rinv_xp.dot(resid) / sigma2 + prior.mean / prior.var), var};
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> normalize_logs(std::vector<double> logs) {
  const double lse = log_sum_exp(logs);
  for (double& x : logs) x = std::exp(x - lse);
  return logs;
}

// log N(y; 0, sigma2 R + B) with B = X S X' from the beta prior (zero prior
// means only), for all sigma2 on a quadrature grid, combined with the IG prior.
double log_marginal(const SpatialDataset& data, const PriorSpec& prior, const Eigen::MatrixXd& R) {
  const Eigen::Index n = data.X.rows();
  Eigen::VectorXd mean_prior(data.X.cols());
  Eigen::VectorXd var_prior(data.X.cols());
  for (Eigen::Index k = 0; k < data.X.cols(); ++k) {
    mean_prior(k) = prior.beta[static_cast<std::size_t>(k)].mean;
    var_prior(k) = prior.beta[static_cast<std::size_t>(k)].var;
  }
  const Eigen::VectorXd centred = data.y - data.X * mean_prior;
  const Eigen::MatrixXd B = data.X * var_prior.asDiagonal() * data.X.transpose();
  // Log-spaced sigma2 grid; trapezoid in log sigma2 with the Jacobian.
  const int nodes = 600;
  const double lo = std::log(1e-3), hi = std::log(1e2);
  const double h = (hi - lo) / (nodes - 1);
  std::vector<double> terms;
  for (int k = 0; k < nodes; ++k) {
    const double ls = lo + h * k;
    const double s2 = std::exp(ls);
    const Eigen::MatrixXd C = s2 * R + B;
    const Eigen::LLT<Eigen::MatrixXd> llt(C);
    const Eigen::VectorXd w = llt.matrixL().solve(centred);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double ll = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - 0.5 * w.squaredNorm();
    const double a = prior.a_sigma, b = prior.b_sigma;
    const double lprior = a * std::log(b) - std::lgamma(a) - (a + 1.0) * ls - b / s2;
    const double weight = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
    terms.push_back(ll + lprior + ls + std::log(weight * h));
  }
  return log_sum_exp(terms);
}

} // namespace

std::vector<double> enumerate_theta_posterior(const SpatialDataset& data, const PriorSpec& prior,
                                              const KernelSpec& kernel) {
  std::vector<double> logs;
  for (double omega : prior.omega_grid)
    for (double phi : prior.phi_grid) {
      const Eigen::MatrixXd R = correlation_matrix(data.locations, omega, phi, kernel.family);
      logs.push_back(log_marginal(data, prior, R));
    }
  return normalize_logs(logs);
}

std::vector<double> enumerate_theta_posterior_fixed(const SpatialDataset& data, const PriorSpec& prior,
                                                    const KernelSpec& kernel, const Eigen::VectorXd& beta,
                                                    double sigma2) {
  std::vector<double> logs;
  for (double omega : prior.omega_grid)
    for (double phi : prior.phi_grid) {
      GpParams params{beta, sigma2, omega, phi};
      logs.push_back(dense_loglik(data, params, kernel));
    }
  return normalize_logs(logs);
}

std::vector<double> grid_pmf(const std::vector<double>& omegas, const std::vector<double>& phis,
                             const PriorSpec& prior) {
  const std::size_t G2 = prior.phi_grid.size();
  std::vector<double> pmf(prior.omega_grid.size() * G2, 0.0);
  auto index_of = [](const std::vector<double>& grid, double v) {
    return static_cast<std::size_t>(std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
                                      return std::abs(a - v) < std::abs(b - v);
                                    }) - grid.begin());
  };
  for (std::size_t k = 0; k < omegas.size(); ++k)
    pmf[index_of(prior.omega_grid, omegas[k]) * G2 + index_of(prior.phi_grid, phis[k])] += 1.0;
  for (double& x : pmf) x /= static_cast<double>(omegas.size());
  return pmf;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s;
}

Kriging dense_kriging(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& x0, const SpatialDataset& train,
                      const GpParams& params, KernelFamily family) {
  const Eigen::MatrixXd R = correlation_matrix(train.locations, params.omega, params.phi, family);
  Eigen::VectorXd r(train.locations.rows());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r(i) = (1.0 - params.omega) * correlation_value(family, (train.locations.row(i) - point).norm(), params.phi);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(R);
  const Eigen::VectorXd w = ldlt.solve(r);
  const double mean = x0.dot(params.beta) + w.dot(train.y - train.X * params.beta);
  return {mean, params.sigma2 * (1.0 - r.dot(w))};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

} // namespace mbgp::testkit
