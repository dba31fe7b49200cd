#include "mbgp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mbgp/error.hpp"
#include "mbgp/simd.hpp"

namespace mbgp {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

} // namespace

void SpatialDataset::validate(bool intercept) const {
  const auto n = y.size();
  require(n >= 1, "dataset must contain at least one observation");
  require(locations.rows() == n, "locations and responses differ in length");
  require(locations.cols() >= 1, "locations need at least one coordinate");
  require(X.rows() == n, "covariate matrix and responses differ in length");
  require(X.cols() >= 1, "covariate matrix needs an intercept column");
  require(split.empty() || split.size() == static_cast<std::size_t>(n),
          "split labels and responses differ in length");
  require(locations.allFinite(), "locations contain non-finite values");
  require(y.allFinite(), "responses contain non-finite values");
  require(X.allFinite(), "covariates contain non-finite values");
  if (intercept) require((X.col(0).array() == 1.0).all(), "covariate column 0 must be all ones");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return locations(a, 0) < locations(b, 0); });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (locations(order[b], 0) - locations(order[a], 0) > kDuplicateTolerance) break;
      const double dist = (locations.row(order[a]) - locations.row(order[b])).norm();
      if (dist <= kDuplicateTolerance)
        throw InputError("duplicate locations at rows " + std::to_string(std::min(order[a], order[b])) +
                         " and " + std::to_string(std::max(order[a], order[b])));
    }
  }
}

SpatialDataset SpatialDataset::rows(std::span<const Index> which) const {
  SpatialDataset out;
  const auto m = static_cast<Eigen::Index>(which.size());
  out.locations.resize(m, locations.cols());
  out.y.resize(m);
  out.X.resize(m, X.cols());
  if (!split.empty()) out.split.resize(which.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    const Index src = which[static_cast<std::size_t>(r)];
    require(src >= 0 && src < static_cast<Index>(size()), "row index out of range");
    out.locations.row(r) = locations.row(src);
    out.y(r) = y(src);
    out.X.row(r) = X.row(src);
    if (!split.empty()) out.split[static_cast<std::size_t>(r)] = split[static_cast<std::size_t>(src)];
  }
  return out;
}

std::vector<Index> SpatialDataset::indices_of(Split which) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const Split s = split.empty() ? Split::train : split[i];
    if (s == which) out.push_back(static_cast<Index>(i));
  }
  return out;
}

double diameter(const Eigen::MatrixXd& locations) {
  const auto n = locations.rows();
  if (n < 2) return 0.0;
  if (locations.cols() == 1)
    return locations.col(0).maxCoeff() - locations.col(0).minCoeff();

  std::vector<Eigen::Index> candidates;
  if (locations.cols() == 2) {
    // Farthest pair lies on the convex hull (monotone chain).
    std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = locations.row(i).transpose();
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
      hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double best = 0.0;
    for (std::size_t a = 0; a < hull.size(); ++a)
      for (std::size_t b = a + 1; b < hull.size(); ++b) best = std::max(best, (hull[a] - hull[b]).norm());
    return best;
  }

  double best = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      best = std::max(best, (locations.row(a) - locations.row(b)).squaredNorm());
  return std::sqrt(best);
}

void KernelSpec::validate() const {
  require(std::isfinite(phi_min) && std::isfinite(phi_max) && phi_min > 0.0 && phi_min < phi_max,
          "kernel bounds must satisfy 0 < phi_min < phi_max < inf");
}

KernelSpec KernelSpec::for_locations(KernelFamily family, const Eigen::MatrixXd& locations) {
  const double d = diameter(locations);
  require(d > 0.0, "cannot derive range bounds from a single location");
  return KernelSpec{family, 1e-3 * d, d};
}

double correlation_value(KernelFamily family, double dist, double phi) noexcept {
  double out = 0.0;
  simd::scalar_kernels().correlation(family, &dist, 1, 1.0 / phi, &out);
  return out;
}

double correlation(const KernelSpec& kernel, double dist, double phi) {
  require(dist >= 0.0, "distance must be nonnegative");
  require(phi >= kernel.phi_min && phi <= kernel.phi_max, "range parameter outside kernel bounds");
  return correlation_value(kernel.family, dist, phi);
}

void GpParams::validate(const KernelSpec& kernel) const {
  require(beta.size() >= 1 && beta.allFinite(), "beta must be a finite, nonempty vector");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be positive");
  require(omega >= 0.0 && omega <= 1.0, "omega must lie in [0, 1]");
  require(phi >= kernel.phi_min && phi <= kernel.phi_max, "phi outside kernel bounds");
}

double covariance_entry(std::size_t i, std::size_t j, const GpParams& params, const KernelSpec& kernel,
                        const Eigen::MatrixXd& locations) {
  const auto n = static_cast<std::size_t>(locations.rows());
  require(i < n && j < n, "covariance index out of range");
  if (i == j) return params.sigma2;
  const double dist = (locations.row(static_cast<Eigen::Index>(i)) - locations.row(static_cast<Eigen::Index>(j))).norm();
  return params.sigma2 * (1.0 - params.omega) * correlation(kernel, dist, params.phi);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& locations, double omega, double phi,
                                   KernelFamily family) {
  const auto n = locations.rows();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double dist = (locations.row(i) - locations.row(j)).norm();
      r(i, j) = r(j, i) = (1.0 - omega) * correlation_value(family, dist, phi);
    }
  }
  return r;
}

ThetaStar to_unconstrained(double omega, double phi, const KernelSpec& kernel) {
  if (!(omega > 0.0 && omega < 1.0))
    throw InputError("omega must be strictly inside (0, 1) to transform; got " + std::to_string(omega));
  if (!(phi > kernel.phi_min && phi < kernel.phi_max))
    throw InputError("phi must be strictly inside its bounds to transform; got " + std::to_string(phi));
  const double u = (phi - kernel.phi_min) / (kernel.phi_max - kernel.phi_min);
  ThetaStar star{logit(omega), logit(u)};
  if (!std::isfinite(star.omega_star) || !std::isfinite(star.phi_star))
    throw InputError("transformed parameters are not finite");
  return star;
}

std::pair<double, double> from_unconstrained(const ThetaStar& star, const KernelSpec& kernel) {
  const double omega = logistic(star.omega_star);
  const double phi = kernel.phi_min + (kernel.phi_max - kernel.phi_min) * logistic(star.phi_star);
  return {omega, std::clamp(phi, kernel.phi_min, kernel.phi_max)};
}

void PriorSpec::validate(const KernelSpec& kernel) const {
  require(!beta.empty(), "prior needs one entry per coefficient");
  for (const auto& b : beta) require(std::isfinite(b.mean) && b.var > 0.0, "coefficient prior variance must be positive");
  require(a_sigma > 0.0 && b_sigma > 0.0, "inverse-gamma prior parameters must be positive");
  if (theta_kind == ThetaPriorKind::continuous) {
    require(theta_var > 0.0, "theta prior variance must be positive");
    return;
  }
  require(!omega_grid.empty() && !phi_grid.empty(), "discrete prior needs nonempty grids");
  auto increasing = [](const std::vector<double>& g) { return std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end(); };
  require(increasing(omega_grid) && increasing(phi_grid), "discrete prior grids must be strictly increasing");
  require(omega_grid.front() >= 0.0 && omega_grid.back() <= 1.0, "omega grid must lie in [0, 1]");
  require(phi_grid.front() >= kernel.phi_min && phi_grid.back() <= kernel.phi_max, "phi grid must lie within the kernel bounds");
}

double PriorSpec::log_theta_density(double omega, double phi, const KernelSpec& kernel) const {
  if (theta_kind == ThetaPriorKind::continuous) {
    const ThetaStar s = to_unconstrained(omega, phi, kernel);
    return -(s.omega_star * s.omega_star + s.phi_star * s.phi_star) / (2.0 * theta_var);
  }
  const auto on_grid = [](const std::vector<double>& g, double v) {
    return std::any_of(g.begin(), g.end(), [&](double x) { return std::abs(x - v) <= 1e-12 * std::max(1.0, std::abs(x)); });
  };
  if (on_grid(omega_grid, omega) && on_grid(phi_grid, phi))
    return -std::log(static_cast<double>(omega_grid.size() * phi_grid.size()));
  return -std::numeric_limits<double>::infinity();
}

PriorSpec PriorSpec::defaults(std::size_t num_coefficients, const KernelSpec& kernel, ThetaPriorKind kind,
                              std::size_t grid_size) {
  PriorSpec prior;
  prior.beta.assign(num_coefficients, Normal{0.0, 1000.0});
  prior.theta_kind = kind;
  if (kind == ThetaPriorKind::discrete) {
    require(grid_size >= 1, "discrete prior grid needs at least one value");
    const double g = static_cast<double>(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
      const double u = (static_cast<double>(k) + 0.5) / g;
      prior.omega_grid.push_back(u);
      prior.phi_grid.push_back(kernel.phi_min + u * (kernel.phi_max - kernel.phi_min));
    }
  }
  return prior;
}

} // namespace mbgp
