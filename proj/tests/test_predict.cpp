#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mbgp/error.hpp"
#include "mbgp/neighbors.hpp"
#include "mbgp/predict.hpp"
#include "support.hpp"

using namespace mbgp;

namespace {

std::vector<Index> all_rows(std::size_t n) {
  std::vector<Index> v(n);
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

TEST(ThinRows, UniformStride) {
  EXPECT_EQ(thin_rows(5, 10), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  const auto t = thin_rows(1000, 10);
  ASSERT_EQ(t.size(), 10u);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  EXPECT_LT(t.back(), 1000u);
  EXPECT_EQ(t[1] - t[0], 100u);
}

TEST(Krige, CoincidentPointInterpolatesWithoutNugget) {
  const auto train = testkit::random_dataset(30, 1, 1);
  const GpParams p{Eigen::Vector2d(0.3, 1.0), 2.0, 0.0, 0.2};
  const auto nb = all_rows(30);
  const Eigen::RowVectorXd x0 = train.X.row(7);
  const auto k = krige(train.locations.row(7), x0, train, nb, p, KernelFamily::exponential);
  EXPECT_NEAR(k.mean, train.y(7), 1e-8);
  EXPECT_NEAR(k.var, 0.0, 1e-10);
}

TEST(Krige, FarPointRevertsToPrior) {
  const auto train = testkit::random_dataset(30, 1, 2);
  const GpParams p{Eigen::Vector2d(0.3, 1.0), 2.0, 0.4, 0.05};
  Eigen::RowVectorXd far(2);
  far << 50.0, 50.0;
  Eigen::RowVectorXd x0(2);
  x0 << 1.0, 0.7;
  const auto k = krige(far, x0, train, all_rows(30), p, KernelFamily::exponential);
  EXPECT_NEAR(k.mean, 0.3 + 0.7, 1e-12);
  EXPECT_NEAR(k.var, 2.0, 1e-12);
}

TEST(Krige, FullNeighborhoodMatchesDenseOracle) {
  const auto train = testkit::gp_dataset(30, Eigen::Vector3d(0.5, 1.0, -2.0), 1.3, 0.3, 0.2, 3);
  const auto test = testkit::random_dataset(10, 2, 4);
  for (auto fam : {KernelFamily::exponential, KernelFamily::matern52}) {
    const GpParams p{Eigen::Vector3d(0.4, 0.9, -1.8), 1.3, 0.25, 0.3};
    for (Eigen::Index t = 0; t < 10; ++t) {
      const auto got = krige(test.locations.row(t), test.X.row(t), train, all_rows(30), p, fam);
      const auto want = testkit::dense_kriging(test.locations.row(t), test.X.row(t), train, p, fam);
      EXPECT_NEAR(got.mean, want.mean, 1e-8);
      EXPECT_NEAR(got.var, want.var, 1e-8);
    }
  }
}

TEST(Predict, SingleDrawGivesKrigingMoments) {
  const auto train = testkit::gp_dataset(200, Eigen::Vector3d(0.5, 1.0, -2.0), 1.3, 0.3, 0.2, 5);
  const auto test = testkit::random_dataset(20, 2, 6);
  const auto kernel = KernelSpec::for_locations(KernelFamily::exponential, train.locations);
  Eigen::MatrixXd draws(1, 6);
  draws << 0.4, 0.9, -1.8, 1.3, 0.25, 0.3;
  PredictOptions opt;
  opt.neighbors = 12;
  const auto s = predict_at(test, train, draws, kernel, opt);
  const KnnIndex knn(train.locations);
  const GpParams p{Eigen::Vector3d(0.4, 0.9, -1.8), 1.3, 0.25, 0.3};
  for (Eigen::Index t = 0; t < 20; ++t) {
    const Eigen::RowVectorXd pt = test.locations.row(t);
    const auto nb = knn.query({pt.data(), 2}, 12);
    const auto k = krige(pt, test.X.row(t), train, nb, p, kernel.family);
    EXPECT_NEAR(s.mean(t), k.mean, 1e-12);
    EXPECT_NEAR(s.sd(t), std::sqrt(k.var), 1e-12);
    EXPECT_NEAR(s.lower(t), k.mean - 1.959963984540054 * std::sqrt(k.var), 1e-7);
    EXPECT_NEAR(s.upper(t), k.mean + 1.959963984540054 * std::sqrt(k.var), 1e-7);
  }
}

TEST(Predict, MixtureMomentsAndDraws) {
  const auto train = testkit::gp_dataset(100, Eigen::Vector3d(0.5, 1.0, -2.0), 1.3, 0.3, 0.2, 7);
  const auto test = testkit::random_dataset(5, 2, 8);
  const auto kernel = KernelSpec::for_locations(KernelFamily::exponential, train.locations);
  Eigen::MatrixXd draws(3, 6);
  draws << 0.4, 0.9, -1.8, 1.3, 0.25, 0.3,
           0.6, 1.1, -2.1, 0.8, 0.40, 0.1,
           0.1, 0.7, -1.5, 2.0, 0.10, 0.5;
  PredictOptions opt;
  opt.neighbors = 10;
  opt.keep_draws = true;
  const auto s = predict_at(test, train, draws, kernel, opt);
  EXPECT_EQ(s.draws.rows(), 5);
  EXPECT_EQ(s.draws.cols(), 3);
  const KnnIndex knn(train.locations);
  for (Eigen::Index t = 0; t < 5; ++t) {
    const Eigen::RowVectorXd pt = test.locations.row(t);
    const auto nb = knn.query({pt.data(), 2}, 10);
    std::vector<double> m, sd;
    double e1 = 0.0, e2 = 0.0;
    for (Eigen::Index r = 0; r < 3; ++r) {
      const GpParams p{draws.row(r).head(3).transpose(), draws(r, 3), draws(r, 4), draws(r, 5)};
      const auto k = krige(pt, test.X.row(t), train, nb, p, kernel.family);
      m.push_back(k.mean);
      sd.push_back(std::sqrt(k.var));
      e1 += k.mean / 3.0;
      e2 += (k.var + k.mean * k.mean) / 3.0;
    }
    EXPECT_NEAR(s.mean(t), e1, 1e-12);
    EXPECT_NEAR(s.sd(t), std::sqrt(e2 - e1 * e1), 1e-10);
    EXPECT_LE(s.lower(t), s.mean(t));
    EXPECT_GE(s.upper(t), s.mean(t));
    EXPECT_NEAR(s.lower(t), mixture_quantile(m, sd, 0.025), 1e-12);
  }
  // Seeded draws are reproducible and independent of the thread count.
  opt.threads = 3;
  const auto again = predict_at(test, train, draws, kernel, opt);
  EXPECT_EQ(again.draws, s.draws);
}

TEST(Predict, RejectsBadInputs) {
  const auto train = testkit::random_dataset(20, 1, 9);
  const auto test = testkit::random_dataset(5, 1, 10);
  const auto kernel = KernelSpec::for_locations(KernelFamily::exponential, train.locations);
  Eigen::MatrixXd draws(1, 5);
  draws << 0.0, 1.0, 1.0, 0.5, 0.2;
  EXPECT_THROW(predict_at(test, train, Eigen::MatrixXd(0, 5), kernel, {}), InputError);
  EXPECT_THROW(predict_at(test, train, Eigen::MatrixXd::Ones(1, 4), kernel, {}), InputError);
  auto out_of_bounds = draws;
  out_of_bounds(0, 4) = kernel.phi_max * 2.0;
  EXPECT_THROW(predict_at(test, train, out_of_bounds, kernel, {}), InputError);
  PredictOptions zero;
  zero.neighbors = 0;
  EXPECT_THROW(predict_at(test, train, draws, kernel, zero), InputError);
}

TEST(MixtureQuantile, MatchesCdf) {
  const std::vector<double> m{-1.0, 0.5, 3.0}, s{1.0, 0.2, 2.0};
  for (double p : {0.025, 0.3, 0.5, 0.975}) {
    const double q = mixture_quantile(m, s, p);
    double cdf = 0.0;
    for (std::size_t k = 0; k < 3; ++k) cdf += normal_cdf((q - m[k]) / s[k]) / 3.0;
    EXPECT_NEAR(cdf, p, 1e-10);
  }
  EXPECT_NEAR(mixture_quantile({2.0}, {1.0}, 0.5), 2.0, 1e-10);
  EXPECT_DOUBLE_EQ(mixture_quantile({2.0}, {0.0}, 0.9), 2.0);
}
