#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/model.hpp"

namespace mbgp {

struct PredictiveSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd lower; // 2.5% point
  Eigen::VectorXd upper; // 97.5% point
  Eigen::MatrixXd draws; // locations x S, only when requested

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

struct PredictOptions {
  std::size_t neighbors = 15;
  std::size_t max_draws = 500;
  bool keep_draws = false; // also sample Y* once per kept posterior draw
  std::uint64_t seed = 1;
  int threads = 1;
};

struct Kriging {
  double mean = 0.0;
  double var = 0.0; // includes the nugget
};

/// Posterior rows kept for prediction: all when there are at most `limit`,
/// otherwise `limit` rows on a uniform stride.
std::vector<std::size_t> thin_rows(std::size_t total, std::size_t limit);

/// Conditional distribution of the response at `point` (covariates `x0`)
/// given the training responses at `neighbors`, under one parameter draw.
Kriging krige(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& x0, const SpatialDataset& train,
              const std::vector<Index>& neighbors, const GpParams& params, KernelFamily family);

/// Predictive distribution at the rows of `test` (its y is ignored). Each row
/// of `draws` is (beta..., sigma2, omega, phi). The summary is the equal-weight
/// mixture of the per-draw kriging normals: its mean, sd and 2.5/97.5% quantiles.
PredictiveSummary predict_at(const SpatialDataset& test, const SpatialDataset& train, const Eigen::MatrixXd& draws,
                             const KernelSpec& kernel, const PredictOptions& options);

/// p-quantile of an equal-weight normal mixture (zero sd means a point mass).
double mixture_quantile(const std::vector<double>& means, const std::vector<double>& sds, double p);

} // namespace mbgp
