#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mbgp/error.hpp"
#include "mbgp/gibbs.hpp"
#include "mbgp/neighbors.hpp"
#include "support.hpp"

using namespace mbgp;

namespace {

struct Fixture {
  SpatialDataset data;
  NeighborGraph graph;
  KernelSpec kernel;
  PriorSpec prior;
};

Fixture make(std::size_t n, std::size_t m, std::uint64_t seed) {
  Fixture f;
  f.data = testkit::gp_dataset(n, Eigen::Vector3d(0.5, 1.0, -2.0), 1.3, 0.3, 0.2, seed);
  f.graph = build_neighbor_sets(f.data.locations, m);
  f.kernel = KernelSpec::for_locations(KernelFamily::exponential, f.data.locations);
  f.prior = PriorSpec::defaults(3, f.kernel, ThetaPriorKind::continuous);
  return f;
}

std::vector<Index> all_indices(std::size_t n) {
  std::vector<Index> v(n);
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

} // namespace

TEST(MinibatchSum, FullBatchIsExactTotal) {
  auto f = make(200, 10, 1);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  const Eigen::VectorXd beta = Eigen::Vector3d(0.4, 0.9, -1.8);
  const auto all = all_indices(200);
  for (int j = 1; j <= 3; ++j) {
    const auto est = minibatch_sum(j, 1, all, cache, beta);
    double exact = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto q = compute_q(i, 1, cache, beta);
      exact += j == 1 ? q.q1 : j == 2 ? q.q2 : q.q3;
    }
    EXPECT_NEAR(est.value, exact, 1e-10 * (std::abs(exact) + 1.0));
    EXPECT_EQ(est.batch_size, 200u);
    EXPECT_EQ(est.j, j);
  }
}

TEST(MinibatchSum, ScalesByPopulationOverBatch) {
  auto f = make(100, 5, 2);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  const Eigen::VectorXd beta = Eigen::Vector3d(0.4, 0.9, -1.8);
  const std::vector<Index> batch{4, 17, 60, 99};
  const auto est = minibatch_sum(3, 0, batch, cache, beta);
  double s = 0.0;
  for (auto i : batch) s += compute_q(static_cast<std::size_t>(i), 0, cache, beta).q3;
  EXPECT_NEAR(est.value, 25.0 * s, 1e-10 * s);
  EXPECT_EQ(est.batch, batch);
}

TEST(MinibatchSum, RejectsBadBatches) {
  auto f = make(50, 5, 3);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  const Eigen::VectorXd beta = Eigen::Vector3d::Zero();
  EXPECT_THROW(minibatch_sum(1, 0, std::vector<Index>{}, cache, beta), InputError);
  EXPECT_THROW(minibatch_sum(1, 0, std::vector<Index>{1, 1}, cache, beta), InputError);
  EXPECT_THROW(minibatch_sum(1, 0, std::vector<Index>{50}, cache, beta), InputError);
  EXPECT_THROW(minibatch_sum(1, 0, std::vector<Index>{-1}, cache, beta), InputError);
  EXPECT_THROW(minibatch_sum(4, 0, std::vector<Index>{1}, cache, beta), InputError);
  EXPECT_THROW(minibatch_sum(1, 3, std::vector<Index>{1}, cache, beta), InputError);
}

TEST(Conditionals, BetaClosedForm) {
  const PriorSpec::Normal prior{1.0, 4.0};
  const auto c = beta_conditional(10.0, 6.0, 2.0, prior);
  const double prec = 10.0 / 2.0 + 1.0 / 4.0;
  EXPECT_NEAR(c.var, 1.0 / prec, 1e-15);
  EXPECT_NEAR(c.mean, (6.0 / 2.0 + 1.0 / 4.0) / prec, 1e-15);
  // No information from the data leaves the prior.
  const auto none = beta_conditional(0.0, 0.0, 2.0, prior);
  EXPECT_DOUBLE_EQ(none.mean, 1.0);
  EXPECT_DOUBLE_EQ(none.var, 4.0);
  // A flat prior gives the least-squares value.
  const auto flat = beta_conditional(10.0, 6.0, 2.0, {0.0, 1e300});
  EXPECT_NEAR(flat.mean, 0.6, 1e-12);
}

TEST(Conditionals, Sigma2ClosedForm) {
  PriorSpec prior;
  prior.a_sigma = 2.0;
  prior.b_sigma = 3.0;
  const auto c = sigma2_conditional(10.0, 40, prior);
  EXPECT_DOUBLE_EQ(c.shape, 22.0);
  EXPECT_DOUBLE_EQ(c.rate, 8.0);
  EXPECT_THROW(sigma2_conditional(-1.0, 40, prior), InputError);
}

TEST(Conditionals, DrawMoments) {
  Rng rng(5);
  const NormalConditional nc{1.5, 0.25};
  const InvGammaParams ig{12.0, 22.0};
  std::vector<double> b, s;
  for (int k = 0; k < 200000; ++k) {
    b.push_back(draw_beta_p(nc, rng));
    s.push_back(draw_sigma2(ig, rng));
  }
  EXPECT_NEAR(testkit::mean(b), 1.5, 0.005);
  EXPECT_NEAR(testkit::variance(b), 0.25, 0.005);
  const double m = 22.0 / 11.0, v = 22.0 * 22.0 / (11.0 * 11.0 * 10.0);
  EXPECT_NEAR(testkit::mean(s), m, 0.005 * m);
  EXPECT_NEAR(testkit::variance(s), v, 0.03 * v);
}

TEST(Conditionals, FullConditioningMatchesDenseOracle) {
  auto f = make(60, 59, 4);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  const auto all = all_indices(60);
  const Eigen::VectorXd beta = Eigen::Vector3d(0.4, 0.9, -1.8);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto s1 = minibatch_sum(1, p, all, cache, beta);
    const auto s2 = minibatch_sum(2, p, all, cache, beta);
    const auto got = beta_conditional(s1.value, s2.value, 1.3, f.prior.beta[p]);
    const auto expect = testkit::dense_beta_conditional(f.data, p, beta, 1.3, 0.3, 0.2, f.kernel.family, f.prior.beta[p]);
    EXPECT_NEAR(got.mean, expect.mean, 1e-8 * (std::abs(expect.mean) + 1.0));
    EXPECT_NEAR(got.var, expect.var, 1e-8 * expect.var);
  }
}

TEST(Conditionals, MinibatchEstimatesAreUnbiased) {
  auto f = make(400, 10, 5);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  cache.ensure_all();
  const Eigen::VectorXd beta = Eigen::Vector3d(0.4, 0.9, -1.8);
  const auto exact = minibatch_sum(3, 0, all_indices(400), cache, beta).value;
  Rng rng(6);
  auto pool = all_indices(400);
  std::vector<double> est;
  for (int r = 0; r < 4000; ++r) {
    std::shuffle(pool.begin(), pool.end(), rng);
    est.push_back(minibatch_sum(3, 0, std::span<const Index>(pool.data(), 40), cache, beta).value);
  }
  const double se = std::sqrt(testkit::variance(est) / 4000.0);
  EXPECT_NEAR(testkit::mean(est), exact, 4.0 * se);
  EXPECT_GT(se, 0.0);
}

TEST(Conditionals, UpdatesUseBatchAndKeepSigmaPositive) {
  auto f = make(300, 10, 7);
  ConditionalCache cache(f.data, f.graph, f.kernel);
  cache.reset(0.3, 0.2);
  cache.ensure_all();
  Rng rng(8);
  Eigen::VectorXd beta = Eigen::Vector3d::Zero();
  double sigma2 = 1.0;
  const auto all = all_indices(300);
  std::vector<double> b1, s2;
  for (int k = 0; k < 3000; ++k) {
    gibbs_update_beta(cache, all, beta, sigma2, f.prior, rng);
    sigma2 = gibbs_update_sigma2(cache, all, beta, f.prior, rng);
    ASSERT_GT(sigma2, 0.0);
    if (k >= 500) {
      b1.push_back(beta(1));
      s2.push_back(sigma2);
    }
  }
  // Generating values are beta_1 = 1, sigma2 = 1.3; the posterior should be near them.
  EXPECT_NEAR(testkit::mean(b1), 1.0, 0.3);
  EXPECT_NEAR(testkit::mean(s2), 1.3, 0.5);
}
