#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "mbgp/predict.hpp"

namespace mbgp {

double crps_gaussian(double mu, double sigma, double y);

/// (1/S) sum |x_s - y| - (1/(2 S^2)) sum_s sum_t |x_s - x_t|.
double crps_ensemble(std::span<const double> samples, double y);

/// Ensemble energy score of the rows of `draws` against `truth`. With
/// max_draws > 0 the rows are thinned to at most that many on a uniform stride.
double energy_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& truth, std::size_t max_draws = 2000);

/// Interval score of [lower, upper] at level alpha.
double interval_score(double lower, double upper, double y, double alpha = 0.05);

struct PredictionMetrics {
  double mae = 0.0;
  double rpmse = 0.0;
  double crps = 0.0;
  double interval = 0.0; // INT
  double width = 0.0;    // WID
  double coverage = 0.0; // CVG
  std::size_t count = 0;
};

PredictionMetrics prediction_metrics(const PredictiveSummary& summary, const Eigen::VectorXd& truth);

} // namespace mbgp
