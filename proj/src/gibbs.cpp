#include "mbgp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbgp/error.hpp"
#include "mbgp/parallel.hpp"

namespace mbgp {

namespace {

double scaled(double total, std::size_t n, std::size_t b) {
  if (b == n) return total; // keeps the full-batch case exact
  return static_cast<double>(n) / static_cast<double>(b) * total;
}

} // namespace

MinibatchSumEstimate minibatch_sum(int j, std::size_t p, std::span<const Index> batch, ConditionalCache& cache,
                                   const Eigen::VectorXd& beta) {
  require(j >= 1 && j <= 3, "q index must be 1, 2 or 3");
  require(!batch.empty(), "minibatch is empty");
  require(p < cache.num_coefficients(), "coefficient index out of range");
  require(static_cast<std::size_t>(beta.size()) == cache.num_coefficients(), "beta has the wrong length");
  const std::size_t n = cache.size();
  std::vector<Index> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  require(sorted.front() >= 0 && static_cast<std::size_t>(sorted.back()) < n, "minibatch index out of range");
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "minibatch has repeated indices");

  cache.ensure(batch);
  std::vector<double> terms(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const QTerms q = compute_q(static_cast<std::size_t>(batch[k]), p, cache, beta);
    terms[k] = j == 1 ? q.q1 : j == 2 ? q.q2 : q.q3;
  }
  MinibatchSumEstimate out;
  out.j = j;
  out.value = scaled(deterministic_sum(terms), n, batch.size());
  out.batch_size = batch.size();
  out.batch.assign(batch.begin(), batch.end());
  return out;
}

NormalConditional beta_conditional(double sum_q1, double sum_q2, double sigma2, const PriorSpec::Normal& prior) {
  const double precision = sum_q1 / sigma2 + 1.0 / prior.var;
  if (!(precision > 0.0) || !std::isfinite(precision))
    throw NumericalError("coefficient conditional has nonpositive precision");
  const double var = 1.0 / precision;
  return {var * (sum_q2 / sigma2 + prior.mean / prior.var), var};
}

InvGammaParams sigma2_conditional(double sum_q3, std::size_t n, const PriorSpec& prior) {
  require(sum_q3 >= 0.0, "sum of squared innovations is negative");
  return {static_cast<double>(n) / 2.0 + prior.a_sigma, sum_q3 / 2.0 + prior.b_sigma};
}

double draw_beta_p(const NormalConditional& cond, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  return cond.mean + std::sqrt(cond.var) * z(rng);
}

double draw_sigma2(const InvGammaParams& params, Rng& rng) {
  std::gamma_distribution<double> g(params.shape, 1.0 / params.rate);
  const double x = g(rng);
  if (!(x > 0.0)) throw NumericalError("inverse-gamma draw underflowed");
  return 1.0 / x;
}

void gibbs_update_beta(const ConditionalCache& cache, std::span<const Index> batch, Eigen::VectorXd& beta,
                       double sigma2, const PriorSpec& prior, Rng& rng) {
  const std::size_t n = cache.size();
  const std::size_t ncoef = cache.num_coefficients();
  const std::size_t b = batch.size();
  std::vector<double> q1(b), q2(b), resid(b);
  // Full residual e_i = z_i - a_i beta, updated as each coefficient moves.
  for (std::size_t k = 0; k < b; ++k) {
    const auto i = static_cast<std::size_t>(batch[k]);
    const auto a = cache.a(i);
    double e = cache.z(i);
    for (std::size_t c = 0; c < ncoef; ++c) e -= a[c] * beta(static_cast<Eigen::Index>(c));
    resid[k] = e;
  }
  for (std::size_t p = 0; p < ncoef; ++p) {
    const double bp = beta(static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < b; ++k) {
      const auto i = static_cast<std::size_t>(batch[k]);
      const double ap = cache.a(i)[p];
      const double v = cache.v(i);
      const double rp = resid[k] + ap * bp;
      q1[k] = ap * ap / v;
      q2[k] = ap * rp / v;
    }
    const auto cond = beta_conditional(scaled(deterministic_sum(q1), n, b), scaled(deterministic_sum(q2), n, b),
                                       sigma2, prior.beta[p]);
    const double next = draw_beta_p(cond, rng);
    for (std::size_t k = 0; k < b; ++k) resid[k] -= cache.a(static_cast<std::size_t>(batch[k]))[p] * (next - bp);
    beta(static_cast<Eigen::Index>(p)) = next;
  }
}

double gibbs_update_sigma2(const ConditionalCache& cache, std::span<const Index> batch, const Eigen::VectorXd& beta,
                           const PriorSpec& prior, Rng& rng) {
  const std::size_t n = cache.size();
  std::vector<double> q3(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) q3[k] = compute_q(static_cast<std::size_t>(batch[k]), 0, cache, beta).q3;
  return draw_sigma2(sigma2_conditional(scaled(deterministic_sum(q3), n, batch.size()), n, prior), rng);
}

} // namespace mbgp
