#include "mbgp/vecchia.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numbers>
#include <string>

#include "mbgp/error.hpp"
#include "mbgp/parallel.hpp"
#include "mbgp/simd.hpp"

namespace mbgp {

namespace {

constexpr double kJitter = 1e-10;
constexpr double kMinVariance = 1e-12;

[[noreturn]] void degenerate(std::size_t i, double v) {
  throw NumericalError("conditional variance of observation " + std::to_string(i) + " is " +
                       std::to_string(v) + " (degenerate conditioning set)");
}

// In-place Cholesky of a small row-major matrix; only the lower triangle is
// read and the factor overwrites it. False when a pivot is not positive.
bool cholesky_lower(double* a, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double* row_j = a + j * m;
    double d = row_j[j];
    for (std::size_t k = 0; k < j; ++k) d -= row_j[k] * row_j[k];
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    row_j[j] = l;
    const double inv = 1.0 / l;
    for (std::size_t i = j + 1; i < m; ++i) {
      double* row_i = a + i * m;
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
      row_i[j] = s * inv;
    }
  }
  return true;
}

// Solves L L' x = rhs with the factor from cholesky_lower.
void cholesky_solve(const double* l, std::size_t m, const double* rhs, double* x) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = l + i * m;
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * x[k];
    x[i] = s / row[i];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= l[k * m + ii] * x[k];
    x[ii] = s / l[ii * m + ii];
  }
}

} // namespace

struct ConditionalCache::Workspace {
  std::vector<double> gathered; // d columns of m neighbor coordinates
  std::vector<const double*> cols;
  std::vector<const double*> shifted;
  std::vector<double> point;
  std::vector<double> dist;
  std::vector<double> rho;
  std::vector<double> r;
  std::vector<double> pair_dist;
  std::vector<double> pair_rho;
  std::vector<double> R;

  void reserve(std::size_t dims, std::size_t m) {
    gathered.resize(dims * m);
    cols.resize(dims);
    shifted.resize(dims);
    point.resize(dims);
    dist.resize(m);
    rho.resize(m);
    r.resize(m);
    pair_dist.resize(m * m / 2 + 1);
    pair_rho.resize(m * m / 2 + 1);
    R.resize(m * m);
  }
};

struct ConditionalCache::Geometry {
  std::vector<std::size_t> offset; // per observation: m target distances, then m(m-1)/2 pairs
  std::vector<double> dist;
};

ConditionalCache::ConditionalCache(const SpatialDataset& ordered, const NeighborGraph& graph, KernelSpec kernel,
                                   int threads)
    : data_(&ordered), graph_(&graph), kernel_(kernel), mode_(CacheMode::vecchia), threads_(threads),
      ncoef_(ordered.num_coefficients()) {
  const std::size_t n = ordered.size();
  require(graph.size() == n, "neighbor graph size does not match the dataset");
  kernel_.validate();
  stamp_.assign(n, 0);
  weights_.assign(graph.total_neighbors(), 0.0);
  v_.assign(n, 0.0);
  z_.assign(n, 0.0);
  a_.assign(n * ncoef_, 0.0);

  std::size_t entries = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = graph.of(i).size();
    entries += m + m * (m - 1) / 2;
  }
  if (entries * sizeof(double) <= kDistanceTableLimit) {
    auto geo = std::make_shared<Geometry>();
    geo->offset.resize(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = graph.of(i).size();
      geo->offset[i + 1] = geo->offset[i] + m + m * (m - 1) / 2;
    }
    geo->dist.resize(entries);
    Workspace ws;
    ws.reserve(ordered.dims(), graph.max_neighbors());
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = graph.of(i).size();
      double* block = geo->dist.data() + geo->offset[i];
      neighbor_distances(i, ws, block, block + m);
    }
    geometry_ = std::move(geo);
  }
}

ConditionalCache ConditionalCache::twin() const {
  ConditionalCache c;
  c.data_ = data_;
  c.graph_ = graph_;
  c.kernel_ = kernel_;
  c.mode_ = mode_;
  c.threads_ = threads_;
  c.ncoef_ = ncoef_;
  c.stamp_.assign(stamp_.size(), 0);
  c.weights_.assign(weights_.size(), 0.0);
  c.v_.assign(v_.size(), 0.0);
  c.z_.assign(z_.size(), 0.0);
  c.a_.assign(a_.size(), 0.0);
  c.geometry_ = geometry_;
  return c;
}

ConditionalCache ConditionalCache::dense(const SpatialDataset& data, KernelSpec kernel) {
  require(data.size() <= kDenseLimit, "dense mode limited to n <= " + std::to_string(kDenseLimit));
  kernel.validate();
  ConditionalCache c;
  c.data_ = &data;
  c.kernel_ = kernel;
  c.mode_ = CacheMode::dense;
  c.ncoef_ = data.num_coefficients();
  const std::size_t n = data.size();
  c.stamp_.assign(n, 0);
  c.v_.assign(n, 0.0);
  c.z_.assign(n, 0.0);
  c.a_.assign(n * c.ncoef_, 0.0);
  return c;
}

void ConditionalCache::reset(double omega, double phi) {
  require(omega >= 0.0 && omega < 1.0, "omega must lie in [0, 1)");
  require(phi >= kernel_.phi_min && phi <= kernel_.phi_max, "phi outside kernel bounds");
  if (has_theta_ && omega == omega_ && phi == phi_) return;
  omega_ = omega;
  phi_ = phi;
  has_theta_ = true;
  ++epoch_;
}

std::span<const double> ConditionalCache::weights(std::size_t i) const noexcept {
  if (mode_ == CacheMode::dense) return {};
  return {weights_.data() + graph_->offset(i), graph_->of(i).size()};
}

void ConditionalCache::ensure(std::span<const Index> indices) {
  require(has_theta_, "cache used before reset()");
  if (mode_ == CacheMode::dense) {
    for (Index i : indices) {
      if (!ready(static_cast<std::size_t>(i))) {
        compute_dense();
        return;
      }
    }
    return;
  }
  std::vector<std::size_t> missing;
  for (Index i : indices) {
    const auto u = static_cast<std::size_t>(i);
    if (!ready(u)) missing.push_back(u);
  }
  if (missing.empty()) return;
  // An index listed twice must not be computed by two workers at once.
  if (threads_ > 1) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  }

  const std::size_t m = graph_->max_neighbors();
  const std::size_t dims = data_->dims();
  const int workers = missing.size() >= 256 ? threads_ : 1;
  std::vector<Workspace> ws(static_cast<std::size_t>(std::max(1, workers)));
  for (auto& w : ws) w.reserve(dims, m);
  parallel_for(missing.size(), 64, workers, [&](std::size_t b, std::size_t e, std::size_t worker) {
    for (std::size_t k = b; k < e; ++k) compute(missing[k], ws[worker]);
  });
  for (std::size_t i : missing) stamp_[i] = epoch_;
  evaluations_ += missing.size();
}

void ConditionalCache::ensure_all() {
  std::vector<Index> all(size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  ensure(all);
}

void ConditionalCache::neighbor_distances(std::size_t i, Workspace& ws, double* to_target, double* pairs) const {
  const auto& kern = simd::active();
  const auto nb = graph_->of(i);
  const std::size_t m = nb.size();
  const std::size_t dims = data_->dims();
  const auto& L = data_->locations;
  for (std::size_t k = 0; k < dims; ++k) {
    double* col = ws.gathered.data() + k * m;
    for (std::size_t t = 0; t < m; ++t) col[t] = L(static_cast<Eigen::Index>(nb[t]), static_cast<Eigen::Index>(k));
    ws.cols[k] = col;
  }
  double* pt = ws.point.data();
  for (std::size_t k = 0; k < dims; ++k) pt[k] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  kern.squared_distances(ws.cols.data(), dims, pt, m, to_target);
  for (std::size_t t = 0; t < m; ++t) to_target[t] = std::sqrt(to_target[t]);

  // Strict lower triangle of the neighbor block, packed column after column.
  std::size_t pos = 0;
  for (std::size_t t = 0; t + 1 < m; ++t) {
    const std::size_t rest = m - t - 1;
    for (std::size_t k = 0; k < dims; ++k) {
      ws.shifted[k] = ws.cols[k] + t + 1;
      pt[k] = ws.cols[k][t];
    }
    kern.squared_distances(ws.shifted.data(), dims, pt, rest, pairs + pos);
    pos += rest;
  }
  for (std::size_t q = 0; q < pos; ++q) pairs[q] = std::sqrt(pairs[q]);
}

void ConditionalCache::compute(std::size_t i, Workspace& ws) {
  const auto& kern = simd::active();
  const auto nb = graph_->of(i);
  const std::size_t m = nb.size();
  const auto& X = data_->X;
  const auto& y = data_->y;
  const auto ii = static_cast<Eigen::Index>(i);
  double* a = a_.data() + i * ncoef_;

  if (m == 0) {
    v_[i] = 1.0;
    z_[i] = y(ii);
    for (std::size_t k = 0; k < ncoef_; ++k) a[k] = X(ii, static_cast<Eigen::Index>(k));
    return;
  }

  const double* to_target = ws.dist.data();
  const double* pair_dist = ws.pair_dist.data();
  if (geometry_) {
    to_target = geometry_->dist.data() + geometry_->offset[i];
    pair_dist = to_target + m;
  } else {
    neighbor_distances(i, ws, ws.dist.data(), ws.pair_dist.data());
  }

  const double inv_phi = 1.0 / phi_;
  const double scale = 1.0 - omega_;
  const std::size_t pairs = m * (m - 1) / 2;
  double* r = ws.r.data();
  kern.correlation(kernel_.family, to_target, m, inv_phi, ws.rho.data());
  for (std::size_t t = 0; t < m; ++t) r[t] = scale * ws.rho[t];
  kern.correlation(kernel_.family, pair_dist, pairs, inv_phi, ws.pair_rho.data());

  double* R = ws.R.data(); // row-major m x m, lower triangle used
  auto fill = [&](double diag) {
    std::size_t q = 0;
    for (std::size_t t = 0; t < m; ++t) {
      R[t * m + t] = diag;
      for (std::size_t u = t + 1; u < m; ++u) R[u * m + t] = scale * ws.pair_rho[q++];
    }
  };
  fill(1.0);
  if (!cholesky_lower(R, m)) {
    fill(1.0 + kJitter);
    if (!cholesky_lower(R, m))
      throw NumericalError("neighbor correlation matrix of observation " + std::to_string(i) +
                           " is not positive definite");
  }
  double* b = weights_.data() + graph_->offset(i);
  cholesky_solve(R, m, r, b);
  double rb = 0.0;
  for (std::size_t t = 0; t < m; ++t) rb += r[t] * b[t];
  const double v = 1.0 - rb;
  if (!(v > kMinVariance)) degenerate(i, v);
  v_[i] = v;

  double zi = y(ii);
  for (std::size_t t = 0; t < m; ++t) zi -= b[t] * y(static_cast<Eigen::Index>(nb[t]));
  z_[i] = zi;
  for (std::size_t k = 0; k < ncoef_; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    double ak = X(ii, kk);
    for (std::size_t t = 0; t < m; ++t) ak -= b[t] * X(static_cast<Eigen::Index>(nb[t]), kk);
    a[k] = ak;
  }
}

void ConditionalCache::compute_dense() {
  const std::size_t n = size();
  Eigen::MatrixXd R = correlation_matrix(data_->locations, omega_, phi_, kernel_.family);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    R.diagonal().array() += kJitter;
    llt.compute(R);
    if (llt.info() != Eigen::Success) throw NumericalError("correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd& Lmat = llt.matrixLLT();
  const Eigen::VectorXd w = llt.matrixL().solve(data_->y);
  const Eigen::MatrixXd W = llt.matrixL().solve(data_->X);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double l = Lmat(ii, ii);
    const double v = l * l;
    if (!(v > kMinVariance)) degenerate(i, v);
    v_[i] = v;
    z_[i] = l * w(ii);
    for (std::size_t k = 0; k < ncoef_; ++k) a_[i * ncoef_ + k] = l * W(ii, static_cast<Eigen::Index>(k));
    stamp_[i] = epoch_;
  }
  evaluations_ += n;
}

double log_density_term(std::size_t i, const ConditionalCache& cache, const Eigen::VectorXd& beta, double sigma2) {
  const auto a = cache.a(i);
  double e = cache.z(i);
  for (std::size_t k = 0; k < a.size(); ++k) e -= a[k] * beta(static_cast<Eigen::Index>(k));
  const double v = cache.v(i);
  return -0.5 * std::log(2.0 * std::numbers::pi * sigma2 * v) - e * e / (2.0 * sigma2 * v);
}

double conditional_mean(std::size_t i, const ConditionalCache& cache, const Eigen::VectorXd& beta) {
  const auto& data = cache.data();
  const auto ii = static_cast<Eigen::Index>(i);
  double ab = 0.0;
  const auto a = cache.a(i);
  for (std::size_t k = 0; k < a.size(); ++k) ab += a[k] * beta(static_cast<Eigen::Index>(k));
  return data.y(ii) - cache.z(i) + ab;
}

double vecchia_loglik(ConditionalCache& cache, const GpParams& params) {
  require(static_cast<std::size_t>(params.beta.size()) == cache.num_coefficients(), "beta has the wrong length");
  require(params.sigma2 > 0.0, "sigma2 must be positive");
  cache.reset(params.omega, params.phi);
  cache.ensure_all();
  std::vector<double> terms(cache.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = log_density_term(i, cache, params.beta, params.sigma2);
  return deterministic_sum(terms);
}

double dense_loglik(const SpatialDataset& data, const GpParams& params, const KernelSpec& kernel) {
  const std::size_t n = data.size();
  require(n <= kDenseLimit, "dense likelihood limited to n <= " + std::to_string(kDenseLimit));
  params.validate(kernel);
  Eigen::MatrixXd R = correlation_matrix(data.locations, params.omega, params.phi, kernel.family);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    R.diagonal().array() += kJitter;
    llt.compute(R);
    if (llt.info() != Eigen::Success) throw NumericalError("correlation matrix is not positive definite");
  }
  const Eigen::VectorXd resid = data.y - data.X * params.beta;
  const Eigen::VectorXd w = llt.matrixL().solve(resid);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double nn = static_cast<double>(n);
  return -0.5 * nn * std::log(2.0 * std::numbers::pi * params.sigma2) - 0.5 * logdet -
         w.squaredNorm() / (2.0 * params.sigma2);
}

double loglik_ratio_term(std::size_t i, const ConditionalCache& proposed, const ConditionalCache& current,
                         const Eigen::VectorXd& beta, double sigma2) {
  auto resid = [&](const ConditionalCache& c) {
    const auto a = c.a(i);
    double e = c.z(i);
    for (std::size_t k = 0; k < a.size(); ++k) e -= a[k] * beta(static_cast<Eigen::Index>(k));
    return e;
  };
  const double ep = resid(proposed);
  const double ec = resid(current);
  const double vp = proposed.v(i);
  const double vc = current.v(i);
  return -0.5 * std::log(vp / vc) - (ep * ep / vp - ec * ec / vc) / (2.0 * sigma2);
}

QTerms compute_q(std::size_t i, std::size_t p, const ConditionalCache& cache, const Eigen::VectorXd& beta) {
  const auto a = cache.a(i);
  const double v = cache.v(i);
  double e = cache.z(i);
  for (std::size_t k = 0; k < a.size(); ++k) e -= a[k] * beta(static_cast<Eigen::Index>(k));
  const double ap = a[p];
  const double rp = e + ap * beta(static_cast<Eigen::Index>(p));
  return {ap * ap / v, ap * rp / v, e * e / v};
}

} // namespace mbgp
