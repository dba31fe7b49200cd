#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/correction.hpp"
#include "mbgp/gibbs.hpp"
#include "mbgp/vecchia.hpp"

namespace mbgp {

/// Batch-size gate as used by the adaptive Barker loop:
/// (n^2 / B) sqrt((n - B) / (n - 1)) sigma2_lambda.
double gate_value(std::size_t n, std::size_t batch, double sigma2_lambda);

/// Same quantity with the usual (unrooted) finite-population factor; this is
/// the sampling variance of n times a without-replacement batch mean.
double classical_gate_value(std::size_t n, std::size_t batch, double sigma2_lambda);

/// True while the batch has to grow.
bool batch_gate(std::size_t n, std::size_t batch, double sigma2_lambda, double c);

/// Unbiased sample variance (denominator B - 1). Needs at least two terms.
double estimate_sigma2_lambda(std::span<const double> terms);

/// Draws indices of {0..n-1} without replacement, a few at a time, by partial
/// Fisher-Yates on a persistent permutation.
class BatchSampler {
public:
  explicit BatchSampler(std::size_t n);

  void restart() noexcept { drawn_ = 0; }
  /// Extends the current batch by min(k, remaining) indices and returns them.
  std::span<const Index> extend(std::size_t k, Rng& rng);
  [[nodiscard]] std::span<const Index> current() const noexcept { return {perm_.data(), drawn_}; }
  [[nodiscard]] std::size_t population() const noexcept { return perm_.size(); }

private:
  std::vector<Index> perm_;
  std::size_t drawn_ = 0;
};

struct AcceptanceDiagnostics {
  std::size_t batch_size = 0;
  double sigma2_lambda = 0.0;
  double gate = 0.0;           // as used by the loop
  double classical_gate = 0.0; // unrooted, for comparison
  double delta = 0.0;
  bool accepted = false;
  bool clamped = false;        // L1* variance came out negative and was set to 0
  double wall_ms = 0.0;
};

struct BarkerConfig {
  std::size_t b_init = 1000;
  std::size_t b_inc = 1000;
  bool full_batch = false; // B = n, gate bypassed
};

/// Default initial Barker batch: max(1000, ceil(0.01 n)), capped at n.
std::size_t default_barker_batch(std::size_t n);

/// Adaptive-batch Barker test. `log_prior_proposal` is
/// log[pi(prop) g(cur | prop)] - log[pi(cur) g(prop | cur)]. Both caches are
/// filled on the batch as needed. The correction distribution fixes c.
AcceptanceDiagnostics barker_accept_step(ConditionalCache& proposed, ConditionalCache& current,
                                         const Eigen::VectorXd& beta, double sigma2, double log_prior_proposal,
                                         const CorrectionDistribution& cd, const BarkerConfig& cfg,
                                         BatchSampler& sampler, Rng& rng);

/// Fixed-batch Metropolis-Hastings test with L = -log U. Exact MH at B = n.
AcceptanceDiagnostics mh_accept_step(ConditionalCache& proposed, ConditionalCache& current,
                                     std::span<const Index> batch, const Eigen::VectorXd& beta, double sigma2,
                                     double log_prior_proposal, Rng& rng);

} // namespace mbgp
