#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/model.hpp"
#include "mbgp/neighbors.hpp"

namespace mbgp {

enum class CacheMode { vecchia, dense };

/// Conditional quantities of each observation for one (omega, phi):
///
///   b_i = R(i, N_i) R(N_i, N_i)^-1      kriging weights
///   v_i = 1 - b_i R(N_i, i)             conditional variance / sigma2
///   z_i = y_i - b_i Y_{N_i}             response innovation
///   a_i = x_i - b_i X_{N_i}             covariate innovation (one per column)
///
/// so that y_i | Y_{N_i} ~ Normal(y_i - z_i + a_i beta, sigma2 v_i). None of
/// these depend on beta or sigma2.
///
/// Entries are filled lazily: reset() switches (omega, phi) in O(1) and
/// ensure() computes only the requested observations that are not yet
/// current. The cache borrows the dataset and graph; both must outlive it.
/// In dense mode the whole vector is computed from one n x n Cholesky factor
/// (full conditioning on every preceding observation).
class ConditionalCache {
public:
  ConditionalCache(const SpatialDataset& ordered, const NeighborGraph& graph, KernelSpec kernel, int threads = 1);

  static ConditionalCache dense(const SpatialDataset& data, KernelSpec kernel);

  /// A fresh cache over the same data, graph and kernel with no theta set.
  /// Shares the precomputed neighbor distances.
  [[nodiscard]] ConditionalCache twin() const;

  void reset(double omega, double phi);

  void ensure(std::span<const Index> indices);
  void ensure_all();

  [[nodiscard]] bool ready(std::size_t i) const noexcept { return has_theta_ && stamp_[i] == epoch_; }

  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  [[nodiscard]] CacheMode mode() const noexcept { return mode_; }
  [[nodiscard]] double omega() const noexcept { return omega_; }
  [[nodiscard]] double phi() const noexcept { return phi_; }
  [[nodiscard]] const KernelSpec& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const SpatialDataset& data() const noexcept { return *data_; }
  [[nodiscard]] const NeighborGraph* graph() const noexcept { return graph_; }
  [[nodiscard]] std::size_t num_coefficients() const noexcept { return ncoef_; }

  /// Weights b_i in the order of graph().of(i). Empty in dense mode.
  [[nodiscard]] std::span<const double> weights(std::size_t i) const noexcept;
  [[nodiscard]] double v(std::size_t i) const noexcept { return v_[i]; }
  [[nodiscard]] double z(std::size_t i) const noexcept { return z_[i]; }
  [[nodiscard]] std::span<const double> a(std::size_t i) const noexcept {
    return {a_.data() + i * ncoef_, ncoef_};
  }

  /// Number of per-observation evaluations performed so far.
  [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
  struct Workspace;
  struct Geometry;

  ConditionalCache() = default;
  void compute(std::size_t i, Workspace& ws);
  void compute_dense();
  void neighbor_distances(std::size_t i, Workspace& ws, double* to_target, double* pairs) const;

  const SpatialDataset* data_ = nullptr;
  const NeighborGraph* graph_ = nullptr;
  KernelSpec kernel_;
  CacheMode mode_ = CacheMode::vecchia;
  int threads_ = 1;
  std::size_t ncoef_ = 0;

  double omega_ = 0.0;
  double phi_ = 0.0;
  bool has_theta_ = false;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t evaluations_ = 0;

  std::vector<double> weights_;
  std::vector<double> v_;
  std::vector<double> z_;
  std::vector<double> a_;

  std::shared_ptr<const Geometry> geometry_; // null when over the memory cap
};

/// Neighbor distances are tabulated up front when they fit in this many bytes.
inline constexpr std::size_t kDistanceTableLimit = std::size_t{1} << 30;

/// log f_i(y_i | Y_{N_i}) for the cache's (omega, phi) and the given beta, sigma2.
double log_density_term(std::size_t i, const ConditionalCache& cache, const Eigen::VectorXd& beta, double sigma2);

/// mu_i = x_i' beta + b_i (Y_{N_i} - X_{N_i} beta).
double conditional_mean(std::size_t i, const ConditionalCache& cache, const Eigen::VectorXd& beta);

/// Sum of log f_i over all observations. Resets the cache to the parameters'
/// (omega, phi) when they differ.
double vecchia_loglik(ConditionalCache& cache, const GpParams& params);

/// Largest n accepted by dense_loglik.
inline constexpr std::size_t kDenseLimit = 20000;

/// Exact multivariate normal log-density of y under Sigma = sigma2 R.
double dense_loglik(const SpatialDataset& data, const GpParams& params, const KernelSpec& kernel);

/// Lambda_i = log f_i(theta_prop) - log f_i(theta_cur) at shared beta, sigma2.
double loglik_ratio_term(std::size_t i, const ConditionalCache& proposed, const ConditionalCache& current,
                         const Eigen::VectorXd& beta, double sigma2);

struct QTerms {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

/// Per-observation pieces of the conjugate updates for coefficient p:
///   q1 = a_ip^2 / v_i,  q2 = a_ip r_p / v_i,  q3 = (y_i - mu_i)^2 / v_i,
/// where r_p = z_i - sum_{k != p} beta_k a_ik is the residual with beta_p held out.
QTerms compute_q(std::size_t i, std::size_t p, const ConditionalCache& cache, const Eigen::VectorXd& beta);

} // namespace mbgp
