#include "mbgp/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mbgp/acceptance.hpp"
#include "mbgp/error.hpp"
#include "mbgp/vecchia.hpp"

namespace mbgp {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::full: return "full";
    case Algorithm::nn: return "nn";
    case Algorithm::barker: return "barker";
    case Algorithm::fb: return "fb";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "full") return Algorithm::full;
  if (name == "nn") return Algorithm::nn;
  if (name == "barker") return Algorithm::barker;
  if (name == "fb") return Algorithm::fb;
  throw InputError("unknown algorithm '" + std::string(name) + "' (expected full, nn, barker or fb)");
}

void AlgoConfig::validate(std::size_t n) const {
  require(n >= 2, "need at least two observations");
  if (algorithm == Algorithm::fb) {
    require(iterations == 0, "fb takes epochs and batches, not iterations");
    require(epochs >= 1 && batches >= 1, "fb needs epochs >= 1 and batches >= 1");
    require(batches <= n, "more batches than observations");
  } else {
    require(epochs == 0 && batches == 0, "epochs and batches apply to fb only");
    require(iterations >= 1, "iterations must be at least 1");
  }
  if (algorithm != Algorithm::full) require(neighbors >= 1, "neighbor count must be at least 1");
  if (algorithm == Algorithm::full) require(n <= kDenseLimit, "full sampler limited to n <= 20000");
  require(batch_fraction > 0.0 && batch_fraction <= 1.0, "batch fraction must lie in (0, 1]");
  require(c > 0.0 && c <= 3.0, "cutoff c must lie in (0, 3]");
  require(scales[0] >= 0.0 && scales[1] >= 0.0 && std::isfinite(scales[0]) && std::isfinite(scales[1]),
          "proposal scales must be finite and nonnegative");
  require(!burn_in || *burn_in <= rows(), "burn-in longer than the chain");
  require(threads >= 1, "threads must be at least 1");
}

std::size_t AlgoConfig::rows() const noexcept {
  return algorithm == Algorithm::fb ? epochs * batches : iterations;
}

std::size_t AlgoConfig::burn_in_rows() const noexcept { return burn_in ? *burn_in : rows() / 2; }

double ChainOutput::acceptance_rate(std::size_t from) const {
  if (from >= accepted.size()) return 0.0;
  const auto hits = std::count(accepted.begin() + static_cast<std::ptrdiff_t>(from), accepted.end(), std::uint8_t{1});
  return static_cast<double>(hits) / static_cast<double>(accepted.size() - from);
}

double ChainOutput::mean_batch_size(std::size_t from) const {
  if (from >= batch_size.size()) return 0.0;
  double s = 0.0;
  for (std::size_t k = from; k < batch_size.size(); ++k) s += static_cast<double>(batch_size[k]);
  return s / static_cast<double>(batch_size.size() - from);
}

double ChainOutput::total_wall_ms() const { return std::accumulate(wall_ms.begin(), wall_ms.end(), 0.0); }

ThetaProposal propose_theta(double omega, double phi, const PriorSpec& prior, const KernelSpec& kernel,
                            const std::array<double, 2>& scales, Rng& rng) {
  ThetaProposal out;
  if (prior.theta_kind == ThetaPriorKind::discrete) {
    std::uniform_int_distribution<std::size_t> pick_omega(0, prior.omega_grid.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_phi(0, prior.phi_grid.size() - 1);
    out.omega = prior.omega_grid[pick_omega(rng)];
    out.phi = prior.phi_grid[pick_phi(rng)];
    return out;
  }
  const ThetaStar cur = to_unconstrained(omega, phi, kernel);
  std::normal_distribution<double> z(0.0, 1.0);
  const double dz0 = z(rng);
  const double dz1 = z(rng);
  if (scales[0] == 0.0 && scales[1] == 0.0) {
    out.omega = omega;
    out.phi = phi;
    return out;
  }
  const ThetaStar next{cur.omega_star + scales[0] * dz0, cur.phi_star + scales[1] * dz1};
  std::tie(out.omega, out.phi) = from_unconstrained(next, kernel);
  out.valid = out.omega > 0.0 && out.omega < 1.0 && out.phi > kernel.phi_min && out.phi < kernel.phi_max;
  return out;
}

double adapt_scale(double scale, double rate, std::size_t t) {
  require(t >= 1, "adaptation window index starts at 1");
  return scale * std::exp((rate - kTargetAcceptance) / std::sqrt(static_cast<double>(t)));
}

std::vector<std::vector<Index>> split_batches(std::size_t n, std::size_t batches, Rng& rng) {
  require(batches >= 1, "need at least one batch");
  require(batches <= n, "more batches than observations");
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  if (batches > 1) std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Index>> out(batches);
  const std::size_t base = n / batches;
  const std::size_t extra = n % batches;
  std::size_t pos = 0;
  for (std::size_t h = 0; h < batches; ++h) {
    const std::size_t size = base + (h < extra ? 1 : 0);
    out[h].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out[h].begin(), out[h].end());
    pos += size;
  }
  return out;
}

std::pair<Eigen::VectorXd, double> ols_start(const SpatialDataset& data) {
  const Eigen::VectorXd beta = data.X.colPivHouseholderQr().solve(data.y);
  const Eigen::VectorXd resid = data.y - data.X * beta;
  const double dof = std::max(1.0, static_cast<double>(data.size()) - static_cast<double>(data.num_coefficients()));
  return {beta, std::max(1e-8, resid.squaredNorm() / dof)};
}

namespace {

using Clock = std::chrono::steady_clock;

double nearest(const std::vector<double>& grid, double x) {
  return *std::min_element(grid.begin(), grid.end(),
                           [&](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
}

struct ThetaState {
  double omega;
  double phi;
};

ThetaState initial_theta(const PriorSpec& prior, const KernelSpec& kernel) {
  const auto [omega, phi] = from_unconstrained({0.0, 0.0}, kernel);
  if (prior.theta_kind == ThetaPriorKind::continuous) return {omega, phi};
  return {nearest(prior.omega_grid, omega), nearest(prior.phi_grid, phi)};
}

} // namespace

ChainOutput run_chain(const SpatialDataset& data, const AlgoConfig& config, const PriorSpec& prior,
                      const KernelSpec& kernel, const CorrectionDistribution* cd) {
  const std::size_t n = data.size();
  config.validate(n);
  kernel.validate();
  prior.validate(kernel);
  require(prior.beta.size() == data.num_coefficients(), "prior has the wrong number of coefficients");
  if (config.algorithm == Algorithm::barker) {
    require(cd != nullptr, "Barker sampler needs a correction distribution");
    require(cd->c() == config.c, "correction distribution was built for a different c");
  }

  Rng rng(config.seed);

  // Conditioning order and neighbor sets; the dense sampler keeps the data as is.
  SpatialDataset ordered;
  NeighborGraph graph;
  const SpatialDataset* work = &data;
  if (config.algorithm != Algorithm::full) {
    const auto perm = order_observations(data.locations, config.ordering, config.seed);
    ordered = data.rows(perm);
    graph = build_neighbor_sets(ordered.locations, config.neighbors, NeighborSearch::automatic, perm, config.ordering);
    work = &ordered;
  }
  auto make_cache = [&] {
    return config.algorithm == Algorithm::full ? ConditionalCache::dense(*work, kernel)
                                               : ConditionalCache(*work, graph, kernel, config.threads);
  };
  ConditionalCache current = make_cache();
  ConditionalCache proposed = current.twin();

  auto [beta, sigma2] = ols_start(*work);
  auto [omega, phi] = initial_theta(prior, kernel);
  current.reset(omega, phi);

  const std::size_t ncoef = data.num_coefficients();
  const std::size_t rows = config.rows();
  const std::size_t burn = config.burn_in_rows();
  const bool adapting = config.adapt && prior.theta_kind == ThetaPriorKind::continuous;
  std::array<double, 2> scales = config.scales;

  ChainOutput out;
  out.config = config;
  out.kernel = kernel;
  out.num_coefficients = ncoef;
  out.draws.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(ncoef + 3));
  out.accepted.resize(rows);
  out.batch_size.resize(rows);
  out.wall_ms.resize(rows);

  std::vector<Index> everything(n);
  std::iota(everything.begin(), everything.end(), Index{0});

  std::vector<std::vector<Index>> fb_batches;
  if (config.algorithm == Algorithm::fb) fb_batches = split_batches(n, config.batches, rng);

  BarkerConfig barker;
  barker.b_init = config.b_init ? config.b_init : default_barker_batch(n);
  barker.b_inc = config.b_inc ? config.b_inc : barker.b_init;
  const auto conj_size = std::min<std::size_t>(
      n, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.batch_fraction * static_cast<double>(n)))));
  BatchSampler beta_sampler(n), sigma_sampler(n), theta_sampler(n);

  std::size_t window_hits = 0;
  std::size_t window_index = 0;

  for (std::size_t row = 0; row < rows; ++row) {
    const auto start = Clock::now();
    try {
      // Data used by the conjugate steps this row.
      std::span<const Index> beta_batch = everything;
      std::span<const Index> sigma_batch = everything;
      if (config.algorithm == Algorithm::fb) {
        const std::size_t h = row % config.batches;
        if (config.resplit && h == 0 && row > 0) fb_batches = split_batches(n, config.batches, rng);
        beta_batch = sigma_batch = fb_batches[h];
      } else if (config.algorithm == Algorithm::barker && conj_size < n) {
        beta_sampler.restart();
        beta_batch = beta_sampler.extend(conj_size, rng);
        sigma_sampler.restart();
        sigma_batch = sigma_sampler.extend(conj_size, rng);
      }

      current.ensure(beta_batch);
      gibbs_update_beta(current, beta_batch, beta, sigma2, prior, rng);
      current.ensure(sigma_batch);
      sigma2 = gibbs_update_sigma2(current, sigma_batch, beta, prior, rng);

      const ThetaProposal prop = propose_theta(omega, phi, prior, kernel, scales, rng);
      AcceptanceDiagnostics diag;
      if (prop.valid) {
        const double log_ratio = prior.log_theta_density(prop.omega, prop.phi, kernel) -
                                 prior.log_theta_density(omega, phi, kernel) + prop.log_proposal_ratio;
        proposed.reset(prop.omega, prop.phi);
        if (config.algorithm == Algorithm::barker) {
          diag = barker_accept_step(proposed, current, beta, sigma2, log_ratio, *cd, barker, theta_sampler, rng);
          out.clamped += diag.clamped ? 1 : 0;
        } else {
          diag = mh_accept_step(proposed, current, beta_batch, beta, sigma2, log_ratio, rng);
        }
      } else {
        diag.batch_size = beta_batch.size();
      }
      if (diag.accepted) {
        std::swap(current, proposed);
        omega = prop.omega;
        phi = prop.phi;
      }

      auto r = out.draws.row(static_cast<Eigen::Index>(row));
      r.head(static_cast<Eigen::Index>(ncoef)) = beta.transpose();
      r(static_cast<Eigen::Index>(ncoef)) = sigma2;
      r(static_cast<Eigen::Index>(ncoef + 1)) = omega;
      r(static_cast<Eigen::Index>(ncoef + 2)) = phi;
      out.accepted[row] = diag.accepted ? 1 : 0;
      out.batch_size[row] = diag.batch_size;

      if (adapting && row < burn) {
        window_hits += diag.accepted ? 1 : 0;
        if ((row + 1) % kAdaptWindow == 0) {
          const double rate = static_cast<double>(window_hits) / static_cast<double>(kAdaptWindow);
          ++window_index;
          for (double& s : scales) s = adapt_scale(s, rate, window_index);
          window_hits = 0;
        }
      }
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(row + 1) + ": " + e.what());
    }
    out.wall_ms[row] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }
  out.final_scales = scales;
  out.cache_evaluations = current.evaluations() + proposed.evaluations();
  return out;
}

} // namespace mbgp
