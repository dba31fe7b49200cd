#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/kernel_family.hpp"

namespace mbgp {

using Index = std::int64_t;

enum class Split : std::uint8_t { train, test };

/// Observations of a spatial field: one row of `locations` per response, and a
/// covariate matrix whose column 0 is the intercept.
struct SpatialDataset {
  Eigen::MatrixXd locations; // n x d
  Eigen::VectorXd y;         // n
  Eigen::MatrixXd X;         // n x (P + 1)
  std::vector<Split> split;  // empty, or one entry per row

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
  [[nodiscard]] std::size_t dims() const noexcept { return static_cast<std::size_t>(locations.cols()); }
  [[nodiscard]] std::size_t num_coefficients() const noexcept { return static_cast<std::size_t>(X.cols()); }

  /// Checks shapes, finiteness, the intercept column when `intercept` is set,
  /// and rejects locations closer than 1e-12 to one another.
  void validate(bool intercept = true) const;

  [[nodiscard]] SpatialDataset rows(std::span<const Index> which) const;
  [[nodiscard]] std::vector<Index> indices_of(Split which) const;
};

/// Largest pairwise distance between rows.
double diameter(const Eigen::MatrixXd& locations);

/// Correlation family and the admissible interval for its range parameter.
struct KernelSpec {
  KernelFamily family = KernelFamily::exponential;
  double phi_min = 1e-3;
  double phi_max = 1.0;

  void validate() const;

  /// Bounds tied to the domain scale: [0.001 D, D] with D the diameter.
  static KernelSpec for_locations(KernelFamily family, const Eigen::MatrixXd& locations);
};

/// rho(dist | phi). Throws InputError for a negative distance or phi outside
/// the kernel bounds.
double correlation(const KernelSpec& kernel, double dist, double phi);

/// Unchecked evaluation used on hot paths.
double correlation_value(KernelFamily family, double dist, double phi) noexcept;

struct GpParams {
  Eigen::VectorXd beta;
  double sigma2 = 1.0; // sill
  double omega = 0.5;  // nugget proportion
  double phi = 0.1;    // range

  void validate(const KernelSpec& kernel) const;
};

/// Sigma(i, j): sigma2 on the diagonal, sigma2 (1 - omega) rho off it.
double covariance_entry(std::size_t i, std::size_t j, const GpParams& params,
                        const KernelSpec& kernel, const Eigen::MatrixXd& locations);

/// R = omega I + (1 - omega) M, the correlation matrix with the nugget folded in.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& locations, double omega, double phi,
                                   KernelFamily family);

/// Real-line coordinates of (omega, phi): logit(omega) and the logit of phi
/// rescaled to its bounds.
struct ThetaStar {
  double omega_star = 0.0;
  double phi_star = 0.0;
};

ThetaStar to_unconstrained(double omega, double phi, const KernelSpec& kernel);
std::pair<double, double> from_unconstrained(const ThetaStar& star, const KernelSpec& kernel);

enum class ThetaPriorKind { continuous, discrete };

struct PriorSpec {
  struct Normal {
    double mean = 0.0;
    double var = 1000.0;
  };

  std::vector<Normal> beta; // one per coefficient
  double a_sigma = 0.01;    // inverse-gamma shape
  double b_sigma = 0.01;    // inverse-gamma rate

  ThetaPriorKind theta_kind = ThetaPriorKind::continuous;
  double theta_var = 3.0;           // variance of omega*, phi* (continuous)
  std::vector<double> omega_grid;   // discrete support, uniform mass
  std::vector<double> phi_grid;

  void validate(const KernelSpec& kernel) const;

  /// log pi(theta) up to a constant shared by all theta. For the continuous
  /// prior the density is taken on the transformed scale.
  [[nodiscard]] double log_theta_density(double omega, double phi, const KernelSpec& kernel) const;

  /// Standard set-up: N(0, 1000) coefficients, IG(0.01, 0.01) sill, and for
  /// the discrete prior `grid_size` values per parameter inset half a step
  /// from the ends of [0, 1] and [phi_min, phi_max].
  static PriorSpec defaults(std::size_t num_coefficients, const KernelSpec& kernel,
                            ThetaPriorKind kind, std::size_t grid_size = 20);
};

} // namespace mbgp
