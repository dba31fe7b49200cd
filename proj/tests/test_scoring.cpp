#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mbgp/error.hpp"
#include "mbgp/scoring.hpp"

using namespace mbgp;

namespace {

// Quadratic-cost oracle of the ensemble CRPS.
double crps_pairs(const std::vector<double>& x, double y) {
  const double s = static_cast<double>(x.size());
  double a = 0.0, b = 0.0;
  for (double u : x) {
    a += std::abs(u - y);
    for (double v : x) b += std::abs(u - v);
  }
  return a / s - b / (2.0 * s * s);
}

std::vector<double> normals(std::size_t n, double mu, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(mu, sd);
  std::vector<double> v(n);
  for (double& e : v) e = z(rng);
  return v;
}

} // namespace

TEST(Crps, GaussianWorkedValue) {
  EXPECT_NEAR(crps_gaussian(0.0, 1.0, 0.0), (std::sqrt(2.0) - 1.0) / std::sqrt(M_PI), 1e-15);
  EXPECT_NEAR(crps_gaussian(0.0, 1.0, 0.0), 0.23370, 1e-5);
  EXPECT_EQ(crps_gaussian(1.5, 0.0, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(crps_gaussian(1.5, 0.0, -0.5), 2.0);
  EXPECT_THROW(crps_gaussian(0.0, -1.0, 0.0), InputError);
}

TEST(Crps, GaussianHomogeneity) {
  for (double sigma : {0.1, 1.0, 7.5})
    for (double y : {-3.0, 0.2, 4.0})
      EXPECT_NEAR(crps_gaussian(1.0, sigma, y), sigma * crps_gaussian(0.0, 1.0, (y - 1.0) / sigma), 1e-12);
}

TEST(Crps, EnsembleMatchesPairwiseOracle) {
  const auto x = normals(200, 0.3, 1.2, 1);
  for (double y : {-2.0, 0.0, 0.3, 5.0}) EXPECT_NEAR(crps_ensemble(x, y), crps_pairs(x, y), 1e-12);
  EXPECT_DOUBLE_EQ(crps_ensemble(std::vector<double>{2.0}, -1.0), 3.0);
  EXPECT_EQ(crps_ensemble(std::vector<double>(5, 1.0), 1.0), 0.0);
  EXPECT_THROW(crps_ensemble(std::vector<double>{}, 0.0), InputError);
}

TEST(Crps, EnsembleConvergesToGaussian) {
  const auto x = normals(10000, 0.5, 2.0, 2);
  double mu = 0.0, var = 0.0;
  for (double v : x) mu += v / 1e4;
  for (double v : x) var += (v - mu) * (v - mu) / (1e4 - 1.0);
  for (double y : {0.5, 2.0, -3.0}) {
    const double want = crps_gaussian(mu, std::sqrt(var), y);
    EXPECT_NEAR(crps_ensemble(x, y), want, 0.02 * want);
  }
}

TEST(Crps, PermutationInvariantAndNonnegative) {
  auto x = normals(300, 0.0, 1.0, 3);
  const double a = crps_ensemble(x, 0.4);
  std::mt19937_64 rng(4);
  std::shuffle(x.begin(), x.end(), rng);
  EXPECT_NEAR(crps_ensemble(x, 0.4), a, 1e-13);
  EXPECT_GE(a, 0.0);
}

TEST(EnergyScore, ReducesToCrpsInOneDimension) {
  const auto x = normals(500, 0.0, 1.0, 5);
  Eigen::MatrixXd d(500, 1);
  for (Eigen::Index i = 0; i < 500; ++i) d(i, 0) = x[static_cast<std::size_t>(i)];
  Eigen::VectorXd t(1);
  t << 0.7;
  EXPECT_NEAR(energy_score(d, t, 0), crps_ensemble(x, 0.7), 1e-12);
}

TEST(EnergyScore, ZeroAtTruthAndPermutationInvariant) {
  Eigen::VectorXd t(3);
  t << 1.0, -2.0, 0.5;
  Eigen::MatrixXd d = t.transpose().replicate(10, 1);
  EXPECT_EQ(energy_score(d, t), 0.0);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  Eigen::MatrixXd r(50, 3);
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index k = 0; k < 3; ++k) r(i, k) = z(rng);
  const double a = energy_score(r, t);
  EXPECT_GT(a, 0.0);
  Eigen::MatrixXd flipped = r.colwise().reverse();
  EXPECT_NEAR(energy_score(flipped, t), a, 1e-12);
  EXPECT_THROW(energy_score(r, Eigen::VectorXd::Zero(2)), InputError);
  EXPECT_THROW(energy_score(Eigen::MatrixXd(0, 3), t), InputError);
}

TEST(EnergyScore, SubsampledWithinThreePercent) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  Eigen::MatrixXd r(8000, 4);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index k = 0; k < 4; ++k) r(i, k) = z(rng) * (k + 1.0) + 0.3 * k;
  Eigen::VectorXd t(4);
  t << 0.5, 0.0, -1.0, 2.0;
  const double full = energy_score(r, t, 0);
  EXPECT_NEAR(energy_score(r, t, 2000), full, 0.03 * full);
}

TEST(IntervalScore, Terms) {
  EXPECT_DOUBLE_EQ(interval_score(-1.0, 1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(interval_score(-1.0, 1.0, -1.5), 2.0 + 40.0 * 0.5);
  EXPECT_DOUBLE_EQ(interval_score(-1.0, 1.0, 3.0), 2.0 + 40.0 * 2.0);
  EXPECT_DOUBLE_EQ(interval_score(-1.0, 1.0, 3.0, 0.1), 2.0 + 20.0 * 2.0);
  EXPECT_THROW(interval_score(1.0, -1.0, 0.0), InputError);
}

TEST(Metrics, PerfectPredictions) {
  PredictiveSummary s;
  s.mean = Eigen::Vector3d(1.0, 2.0, 3.0);
  s.sd = Eigen::Vector3d::Zero();
  s.lower = s.mean;
  s.upper = s.mean;
  const auto m = prediction_metrics(s, s.mean);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.rpmse, 0.0);
  EXPECT_EQ(m.crps, 0.0);
  EXPECT_EQ(m.interval, 0.0);
  EXPECT_EQ(m.width, 0.0);
  EXPECT_EQ(m.coverage, 1.0);
  EXPECT_EQ(m.count, 3u);
}

TEST(Metrics, HandComputed) {
  PredictiveSummary s;
  s.mean = Eigen::Vector2d(0.0, 1.0);
  s.sd = Eigen::Vector2d(1.0, 2.0);
  s.lower = Eigen::Vector2d(-1.0, 0.0);
  s.upper = Eigen::Vector2d(1.0, 3.0);
  const Eigen::Vector2d y(2.0, 1.0);
  const auto m = prediction_metrics(s, y);
  EXPECT_DOUBLE_EQ(m.mae, 1.0);
  EXPECT_DOUBLE_EQ(m.rpmse, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(m.width, 2.5);
  EXPECT_DOUBLE_EQ(m.coverage, 0.5);
  EXPECT_DOUBLE_EQ(m.interval, 0.5 * ((2.0 + 40.0) + 3.0));
  EXPECT_NEAR(m.crps, 0.5 * (crps_gaussian(0.0, 1.0, 2.0) + crps_gaussian(1.0, 2.0, 1.0)), 1e-15);
  EXPECT_THROW(prediction_metrics(s, Eigen::Vector3d::Zero()), InputError);
}
