#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace mbgp {

/// Grids of the correction fit: masses live on the support grid, the fit and
/// its error are measured on the (finer) evaluation grid.
struct CorrectionGrid {
  double lo = -15.0;
  double hi = 15.0;
  double support_step = 0.05;
  double eval_step = 0.01;

  [[nodiscard]] std::vector<double> support() const;
  [[nodiscard]] std::vector<double> evaluation() const;
  void validate() const;

  friend bool operator==(const CorrectionGrid&, const CorrectionGrid&) = default;
};

/// Largest sup-error a correction distribution may carry.
inline constexpr double kCertificationThreshold = 0.02;

/// A discrete distribution h on the support grid such that h convolved with
/// Normal(0, c) is close to the standard logistic density.
class CorrectionDistribution {
public:
  CorrectionDistribution() = default;
  CorrectionDistribution(double c, CorrectionGrid grid, double lambda, std::vector<double> mass, double sup_error);

  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] const CorrectionGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] const std::vector<double>& support() const noexcept { return support_; }
  [[nodiscard]] const std::vector<double>& mass() const noexcept { return mass_; }
  [[nodiscard]] double sup_error() const noexcept { return sup_error_; }
  [[nodiscard]] double mean() const;

  /// Inverse-CDF draw of a support point.
  [[nodiscard]] double sample(std::mt19937_64& rng) const;

  friend bool operator==(const CorrectionDistribution&, const CorrectionDistribution&) = default;

private:
  double c_ = 1.0;
  CorrectionGrid grid_;
  double lambda_ = 0.0;
  std::vector<double> support_;
  std::vector<double> mass_;
  std::vector<double> cdf_;
  double sup_error_ = 0.0;
};

/// Standard logistic density.
double logistic_density(double z) noexcept;

/// max_z |sum_x h(x) N(z - x; 0, c) - logistic(z)| over the evaluation grid.
double correction_sup_error(double c, const CorrectionGrid& grid, const std::vector<double>& mass);

struct CorrectionFit {
  std::vector<double> mass; // normalized to sum 1
  double sup_error = 0.0;
  std::size_t active = 0;   // nonzero masses
};

/// Nonnegative L1-penalized least squares fit for one c and lambda, with a
/// soft sum-to-one row. No certification.
CorrectionFit fit_correction(double c, double lambda, const CorrectionGrid& grid = {});

/// Penalty ladder searched by select_lambda, largest first.
const std::vector<double>& lambda_ladder();

/// Largest ladder value whose c = 1 fit stays within 0.01 sup-error.
double select_lambda(const CorrectionGrid& grid = {});

/// Fit, normalize and certify. Throws NumericalError if the sup-error exceeds
/// kCertificationThreshold. Without `lambda` the penalty comes from select_lambda.
CorrectionDistribution estimate_correction_distribution(double c, const CorrectionGrid& grid = {},
                                                        std::optional<double> lambda = std::nullopt);

void write_correction(std::ostream& out, const CorrectionDistribution& cd);
CorrectionDistribution read_correction(std::istream& in);

} // namespace mbgp
