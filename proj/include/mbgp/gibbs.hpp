#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/model.hpp"
#include "mbgp/vecchia.hpp"

namespace mbgp {

using Rng = std::mt19937_64;

/// n times the batch mean of one of the q terms (j = 1, 2, 3).
struct MinibatchSumEstimate {
  int j = 1;
  double value = 0.0;
  std::size_t batch_size = 0;
  std::vector<Index> batch;
};

/// (n / B) sum_{i in batch} q_j(s_i) with coefficient p held out for j = 2.
/// Rejects empty batches, out-of-range and repeated indices. Computes any
/// cache entries the batch needs.
MinibatchSumEstimate minibatch_sum(int j, std::size_t p, std::span<const Index> batch, ConditionalCache& cache,
                                   const Eigen::VectorXd& beta);

struct NormalConditional {
  double mean = 0.0;
  double var = 1.0;
};

struct InvGammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

/// Complete conditional of beta_p given the (estimated) sums of q1 and q2.
NormalConditional beta_conditional(double sum_q1, double sum_q2, double sigma2, const PriorSpec::Normal& prior);

/// Complete conditional of sigma2: IG(n/2 + a, sum_q3/2 + b). Negative sums are an input error.
InvGammaParams sigma2_conditional(double sum_q3, std::size_t n, const PriorSpec& prior);

double draw_beta_p(const NormalConditional& cond, Rng& rng);
double draw_sigma2(const InvGammaParams& params, Rng& rng);

/// Systematic scan over the coefficients, each drawn from its conditional with
/// sums estimated on `batch` (n/B scaling). The cache must be ready on batch.
void gibbs_update_beta(const ConditionalCache& cache, std::span<const Index> batch, Eigen::VectorXd& beta,
                       double sigma2, const PriorSpec& prior, Rng& rng);

/// Draws sigma2 with the q3 sum estimated on `batch`. The cache must be ready on batch.
double gibbs_update_sigma2(const ConditionalCache& cache, std::span<const Index> batch, const Eigen::VectorXd& beta,
                           const PriorSpec& prior, Rng& rng);

} // namespace mbgp
