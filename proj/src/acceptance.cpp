#include "mbgp/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "mbgp/error.hpp"
#include "mbgp/parallel.hpp"

namespace mbgp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void append_lambda(std::span<const Index> indices, const ConditionalCache& proposed, const ConditionalCache& current,
                   const Eigen::VectorXd& beta, double sigma2, std::vector<double>& terms) {
  for (Index i : indices)
    terms.push_back(loglik_ratio_term(static_cast<std::size_t>(i), proposed, current, beta, sigma2));
}

double scaled_sum(std::span<const double> terms, std::size_t n) {
  const double total = deterministic_sum(terms);
  if (terms.size() == n) return total;
  return static_cast<double>(n) / static_cast<double>(terms.size()) * total;
}

} // namespace

double gate_value(std::size_t n, std::size_t batch, double sigma2_lambda) {
  if (n <= 1 || batch >= n) return 0.0;
  const double nn = static_cast<double>(n);
  const double b = static_cast<double>(batch);
  return nn * nn / b * std::sqrt((nn - b) / (nn - 1.0)) * sigma2_lambda;
}

double classical_gate_value(std::size_t n, std::size_t batch, double sigma2_lambda) {
  if (n <= 1 || batch >= n) return 0.0;
  const double nn = static_cast<double>(n);
  const double b = static_cast<double>(batch);
  return nn * nn / b * ((nn - b) / (nn - 1.0)) * sigma2_lambda;
}

bool batch_gate(std::size_t n, std::size_t batch, double sigma2_lambda, double c) {
  return gate_value(n, batch, sigma2_lambda) > c;
}

double estimate_sigma2_lambda(std::span<const double> terms) {
  require(terms.size() >= 2, "variance needs at least two terms");
  const double mean = deterministic_sum(terms) / static_cast<double>(terms.size());
  std::vector<double> sq(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double d = terms[k] - mean;
    sq[k] = d * d;
  }
  return deterministic_sum(sq) / static_cast<double>(terms.size() - 1);
}

BatchSampler::BatchSampler(std::size_t n) : perm_(n) {
  require(n >= 1, "batch sampler needs a nonempty population");
  std::iota(perm_.begin(), perm_.end(), Index{0});
}

std::span<const Index> BatchSampler::extend(std::size_t k, Rng& rng) {
  const std::size_t n = perm_.size();
  const std::size_t start = drawn_;
  const std::size_t stop = std::min(n, drawn_ + k);
  for (std::size_t t = start; t < stop; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, n - 1);
    std::swap(perm_[t], perm_[pick(rng)]);
  }
  drawn_ = stop;
  return {perm_.data() + start, stop - start};
}

std::size_t default_barker_batch(std::size_t n) {
  const auto one_percent = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(n)));
  return std::min(n, std::max<std::size_t>(1000, one_percent));
}

AcceptanceDiagnostics barker_accept_step(ConditionalCache& proposed, ConditionalCache& current,
                                         const Eigen::VectorXd& beta, double sigma2, double log_prior_proposal,
                                         const CorrectionDistribution& cd, const BarkerConfig& cfg,
                                         BatchSampler& sampler, Rng& rng) {
  const auto start = Clock::now();
  const std::size_t n = current.size();
  require(proposed.size() == n && sampler.population() == n, "caches and sampler disagree on n");
  require(cfg.b_init >= 1 && cfg.b_inc >= 1, "Barker batch sizes must be at least 1");
  const double c = cd.c();

  std::vector<double> terms;
  terms.reserve(cfg.full_batch ? n : std::min(n, cfg.b_init));
  auto grow = [&](std::size_t k) {
    const auto fresh = sampler.extend(k, rng);
    proposed.ensure(fresh);
    current.ensure(fresh);
    append_lambda(fresh, proposed, current, beta, sigma2, terms);
  };

  sampler.restart();
  grow(cfg.full_batch ? n : cfg.b_init);
  auto variance = [&] { return terms.size() >= 2 ? estimate_sigma2_lambda(terms) : 0.0; };
  double s2 = variance();
  if (!cfg.full_batch) {
    while (terms.size() < n && batch_gate(n, terms.size(), s2, c)) {
      grow(cfg.b_inc);
      s2 = variance();
    }
  }

  AcceptanceDiagnostics d;
  d.batch_size = terms.size();
  d.sigma2_lambda = s2;
  d.gate = gate_value(n, d.batch_size, s2);
  d.classical_gate = classical_gate_value(n, d.batch_size, s2);
  double l1_var = c - d.gate;
  if (l1_var < 0.0) {
    l1_var = 0.0;
    d.clamped = true;
  }
  std::normal_distribution<double> z(0.0, 1.0);
  const double l1 = std::sqrt(l1_var) * z(rng);
  const double l2 = cd.sample(rng);
  d.delta = scaled_sum(terms, n) + log_prior_proposal + l1 + l2;
  d.accepted = d.delta > 0.0;
  d.wall_ms = elapsed_ms(start);
  return d;
}

AcceptanceDiagnostics mh_accept_step(ConditionalCache& proposed, ConditionalCache& current,
                                     std::span<const Index> batch, const Eigen::VectorXd& beta, double sigma2,
                                     double log_prior_proposal, Rng& rng) {
  const auto start = Clock::now();
  require(!batch.empty(), "minibatch is empty");
  const std::size_t n = current.size();
  proposed.ensure(batch);
  current.ensure(batch);
  std::vector<double> terms;
  terms.reserve(batch.size());
  append_lambda(batch, proposed, current, beta, sigma2, terms);

  AcceptanceDiagnostics d;
  d.batch_size = batch.size();
  d.sigma2_lambda = terms.size() >= 2 ? estimate_sigma2_lambda(terms) : 0.0;
  d.gate = gate_value(n, d.batch_size, d.sigma2_lambda);
  d.classical_gate = classical_gate_value(n, d.batch_size, d.sigma2_lambda);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double l = -std::log1p(-u(rng)); // -log U with U in (0, 1]
  d.delta = scaled_sum(terms, n) + log_prior_proposal + l;
  d.accepted = d.delta > 0.0;
  d.wall_ms = elapsed_ms(start);
  return d;
}

} // namespace mbgp
