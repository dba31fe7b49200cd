#include "mbgp/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mbgp/error.hpp"

namespace mbgp {

double crps_gaussian(double mu, double sigma, double y) {
  require(sigma >= 0.0, "CRPS needs a nonnegative standard deviation");
  if (sigma == 0.0) return std::abs(y - mu);
  const double z = (y - mu) / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_ensemble(std::span<const double> samples, double y) {
  require(!samples.empty(), "CRPS needs at least one sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double S = static_cast<double>(x.size());
  double abs_dev = 0.0;
  double spread = 0.0; // sum over ordered pairs of |x_s - x_t|, halved
  for (std::size_t i = 0; i < x.size(); ++i) {
    abs_dev += std::abs(x[i] - y);
    spread += x[i] * (2.0 * static_cast<double>(i) - S + 1.0);
  }
  return std::max(0.0, abs_dev / S - spread / (S * S));
}

double energy_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& truth, std::size_t max_draws) {
  require(draws.rows() >= 1 && draws.cols() >= 1, "energy score needs at least one draw");
  require(draws.cols() == truth.size(), "draws and truth differ in dimension");
  const auto kept = thin_rows(static_cast<std::size_t>(draws.rows()), max_draws);
  const double S = static_cast<double>(kept.size());
  double to_truth = 0.0;
  double pairs = 0.0;
  for (std::size_t a = 0; a < kept.size(); ++a) {
    const auto ra = draws.row(static_cast<Eigen::Index>(kept[a]));
    to_truth += (ra - truth.transpose()).norm();
    for (std::size_t b = 0; b < a; ++b) pairs += (ra - draws.row(static_cast<Eigen::Index>(kept[b]))).norm();
  }
  // pairs counts each unordered pair once; the full double sum is twice that.
  return std::max(0.0, to_truth / S - pairs / (S * S));
}

double interval_score(double lower, double upper, double y, double alpha) {
  require(lower <= upper, "interval bounds are reversed");
  require(alpha > 0.0 && alpha < 1.0, "interval level must lie in (0, 1)");
  double s = upper - lower;
  if (y < lower) s += 2.0 / alpha * (lower - y);
  if (y > upper) s += 2.0 / alpha * (y - upper);
  return s;
}

PredictionMetrics prediction_metrics(const PredictiveSummary& summary, const Eigen::VectorXd& truth) {
  const std::size_t n = summary.size();
  require(static_cast<std::size_t>(truth.size()) == n, "predictions and truth differ in length");
  require(n >= 1, "no predictions to score");
  PredictionMetrics m;
  m.count = n;
  double sq = 0.0;
  std::size_t covered = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double err = summary.mean(i) - truth(i);
    m.mae += std::abs(err);
    sq += err * err;
    m.crps += crps_gaussian(summary.mean(i), summary.sd(i), truth(i));
    m.interval += interval_score(summary.lower(i), summary.upper(i), truth(i));
    m.width += summary.upper(i) - summary.lower(i);
    covered += (truth(i) >= summary.lower(i) && truth(i) <= summary.upper(i)) ? 1 : 0;
  }
  const double nn = static_cast<double>(n);
  m.mae /= nn;
  m.rpmse = std::sqrt(sq / nn);
  m.crps /= nn;
  m.interval /= nn;
  m.width /= nn;
  m.coverage = static_cast<double>(covered) / nn;
  return m;
}

} // namespace mbgp
