#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/correction.hpp"
#include "mbgp/gibbs.hpp"
#include "mbgp/model.hpp"
#include "mbgp/neighbors.hpp"

namespace mbgp {

enum class Algorithm { full, nn, barker, fb };

std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::nn;
  std::size_t iterations = 0; // full, nn, barker
  std::size_t epochs = 0;     // fb
  std::size_t batches = 0;    // fb: H
  std::size_t neighbors = 15; // M
  double batch_fraction = 0.25; // barker: share of n used by the conjugate steps
  double c = 1.0;
  std::size_t b_init = 0; // 0 picks the default
  std::size_t b_inc = 0;
  std::array<double, 2> scales{0.3, 0.3}; // random-walk sd for omega*, phi*
  std::optional<std::size_t> burn_in;     // defaults to half the stored rows
  bool adapt = true;
  bool resplit = false; // fb: new split every epoch
  std::uint64_t seed = 1;
  OrderingScheme ordering = OrderingScheme::maxmin;
  int threads = 1;

  void validate(std::size_t n) const;
  /// Number of stored rows: iterations, or epochs x batches for fb.
  [[nodiscard]] std::size_t rows() const noexcept;
  [[nodiscard]] std::size_t burn_in_rows() const noexcept;
};

struct ChainOutput {
  Eigen::MatrixXd draws; // rows x (P + 1 + 3): beta..., sigma2, omega, phi
  std::vector<std::uint8_t> accepted;
  std::vector<std::size_t> batch_size;
  std::vector<double> wall_ms;
  std::array<double, 2> final_scales{0.0, 0.0};
  std::size_t clamped = 0; // Barker steps whose L1* variance was clamped
  std::uint64_t cache_evaluations = 0;
  AlgoConfig config;
  KernelSpec kernel;
  std::size_t num_coefficients = 0;

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(draws.rows()); }
  [[nodiscard]] double acceptance_rate(std::size_t from = 0) const;
  [[nodiscard]] double mean_batch_size(std::size_t from = 0) const;
  [[nodiscard]] double total_wall_ms() const;
};

struct ThetaProposal {
  double omega = 0.0;
  double phi = 0.0;
  double log_proposal_ratio = 0.0; // log g(cur | prop) - log g(prop | cur)
  bool valid = true;               // false when a random walk left the open domain numerically
};

/// Continuous prior: Gaussian random walk on (omega*, phi*) with the given
/// scales. Discrete prior: independent uniform draw over the grid.
ThetaProposal propose_theta(double omega, double phi, const PriorSpec& prior, const KernelSpec& kernel,
                            const std::array<double, 2>& scales, Rng& rng);

/// Window size of the burn-in scale adaptation.
inline constexpr std::size_t kAdaptWindow = 50;
inline constexpr double kTargetAcceptance = 0.4;

/// scale * exp((rate - 0.4) / sqrt(t)) for the t-th adaptation window.
double adapt_scale(double scale, double rate, std::size_t t);

/// Random disjoint cover of {0..n-1} by H sets whose sizes differ by at most
/// one, each sorted. H = 1 returns {0..n-1} and draws nothing from rng.
std::vector<std::vector<Index>> split_batches(std::size_t n, std::size_t batches, Rng& rng);

/// Ordinary least squares start for beta and sigma2.
std::pair<Eigen::VectorXd, double> ols_start(const SpatialDataset& data);

/// Runs one chain on `data` (training rows, any order). `cd` is required for
/// the Barker sampler and must have c equal to config.c.
ChainOutput run_chain(const SpatialDataset& data, const AlgoConfig& config, const PriorSpec& prior,
                      const KernelSpec& kernel, const CorrectionDistribution* cd = nullptr);

} // namespace mbgp
