#include "mbgp/predict.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mbgp/error.hpp"
#include "mbgp/neighbors.hpp"
#include "mbgp/parallel.hpp"

namespace mbgp {

namespace {

// Distances among the neighbors (lower triangle used) and to the target.
struct LocalGeometry {
  Eigen::MatrixXd between;
  Eigen::VectorXd to_target;
};

LocalGeometry geometry(const Eigen::RowVectorXd& point, const Eigen::MatrixXd& locations,
                       const std::vector<Index>& neighbors) {
  const auto m = static_cast<Eigen::Index>(neighbors.size());
  LocalGeometry g{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd(m)};
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto row_a = locations.row(neighbors[static_cast<std::size_t>(a)]);
    g.to_target(a) = (row_a - point).norm();
    for (Eigen::Index b = 0; b < a; ++b) g.between(a, b) = (row_a - locations.row(neighbors[static_cast<std::size_t>(b)])).norm();
  }
  return g;
}

Kriging krige_local(const LocalGeometry& g, const Eigen::VectorXd& y_nb, const Eigen::MatrixXd& x_nb,
                    const Eigen::RowVectorXd& x0, const Eigen::VectorXd& beta, double sigma2, double omega, double phi,
                    KernelFamily family) {
  const Eigen::Index m = g.to_target.size();
  const double scale = 1.0 - omega;
  Eigen::MatrixXd R(m, m);
  Eigen::VectorXd r(m);
  auto fill = [&](double diag) {
    for (Eigen::Index a = 0; a < m; ++a) {
      R(a, a) = diag;
      for (Eigen::Index b = 0; b < a; ++b) R(a, b) = scale * correlation_value(family, g.between(a, b), phi);
    }
  };
  for (Eigen::Index a = 0; a < m; ++a) r(a) = scale * correlation_value(family, g.to_target(a), phi);
  fill(1.0);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    fill(1.0 + 1e-10);
    llt.compute(R);
    if (llt.info() != Eigen::Success) throw NumericalError("prediction neighbor correlation is not positive definite");
  }
  const Eigen::VectorXd b = llt.solve(r);
  // v may round slightly below zero when the target sits on a training point
  // without nugget; that case is exact interpolation.
  const double v = std::max(0.0, 1.0 - r.dot(b));
  const double mean = x0.dot(beta) + b.dot(y_nb - x_nb * beta);
  return {mean, sigma2 * v};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

std::vector<std::size_t> thin_rows(std::size_t total, std::size_t limit) {
  std::vector<std::size_t> rows;
  if (total == 0) return rows;
  if (limit == 0 || total <= limit) {
    rows.resize(total);
    for (std::size_t k = 0; k < total; ++k) rows[k] = k;
    return rows;
  }
  rows.resize(limit);
  const double stride = static_cast<double>(total) / static_cast<double>(limit);
  for (std::size_t k = 0; k < limit; ++k) rows[k] = std::min(total - 1, static_cast<std::size_t>(std::floor(static_cast<double>(k) * stride)));
  return rows;
}

Kriging krige(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& x0, const SpatialDataset& train,
              const std::vector<Index>& neighbors, const GpParams& params, KernelFamily family) {
  require(!neighbors.empty(), "kriging needs at least one neighbor");
  const auto g = geometry(point, train.locations, neighbors);
  const auto m = static_cast<Eigen::Index>(neighbors.size());
  Eigen::VectorXd y_nb(m);
  Eigen::MatrixXd x_nb(m, train.X.cols());
  for (Eigen::Index a = 0; a < m; ++a) {
    y_nb(a) = train.y(neighbors[static_cast<std::size_t>(a)]);
    x_nb.row(a) = train.X.row(neighbors[static_cast<std::size_t>(a)]);
  }
  return krige_local(g, y_nb, x_nb, x0, params.beta, params.sigma2, params.omega, params.phi, family);
}

double mixture_quantile(const std::vector<double>& means, const std::vector<double>& sds, double p) {
  require(!means.empty() && means.size() == sds.size(), "mixture needs matching nonempty components");
  require(p > 0.0 && p < 1.0, "quantile level must lie in (0, 1)");
  const double w = 1.0 / static_cast<double>(means.size());
  auto cdf = [&](double x) {
    double f = 0.0;
    for (std::size_t s = 0; s < means.size(); ++s)
      f += sds[s] > 0.0 ? normal_cdf((x - means[s]) / sds[s]) : (x >= means[s] ? 1.0 : 0.0);
    return f * w;
  };
  double lo = means[0], hi = means[0];
  for (std::size_t s = 0; s < means.size(); ++s) {
    lo = std::min(lo, means[s] - 10.0 * sds[s]);
    hi = std::max(hi, means[s] + 10.0 * sds[s]);
  }
  if (lo == hi) return lo;
  lo -= 1e-12 * std::max(1.0, std::abs(lo));
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

PredictiveSummary predict_at(const SpatialDataset& test, const SpatialDataset& train, const Eigen::MatrixXd& draws,
                             const KernelSpec& kernel, const PredictOptions& options) {
  require(draws.rows() >= 1, "prediction needs at least one posterior draw");
  require(options.neighbors >= 1, "prediction neighbor count must be at least 1");
  require(train.size() >= 1, "prediction needs training data");
  require(test.dims() == train.dims(), "test and training locations differ in dimension");
  require(test.num_coefficients() == train.num_coefficients(), "test and training covariates differ");
  const auto ncoef = static_cast<Eigen::Index>(train.num_coefficients());
  require(draws.cols() == ncoef + 3, "posterior draws have the wrong number of columns");

  const auto kept = thin_rows(static_cast<std::size_t>(draws.rows()), options.max_draws);
  const std::size_t S = kept.size();
  for (std::size_t s : kept) {
    const auto row = draws.row(static_cast<Eigen::Index>(s));
    const double sigma2 = row(ncoef), omega = row(ncoef + 1), phi = row(ncoef + 2);
    require(sigma2 > 0.0 && omega >= 0.0 && omega <= 1.0 && phi >= kernel.phi_min && phi <= kernel.phi_max,
            "posterior draw outside parameter bounds (kernel metadata mismatch?)");
  }

  const std::size_t nt = test.size();
  const std::size_t m = std::min(options.neighbors, train.size());
  const KnnIndex knn(train.locations);

  PredictiveSummary out;
  out.mean.resize(static_cast<Eigen::Index>(nt));
  out.sd.resize(static_cast<Eigen::Index>(nt));
  out.lower.resize(static_cast<Eigen::Index>(nt));
  out.upper.resize(static_cast<Eigen::Index>(nt));
  if (options.keep_draws) out.draws.resize(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(S));

  parallel_for(nt, 16, options.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> means(S), sds(S);
    for (std::size_t j = begin; j < end; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const Eigen::RowVectorXd point = test.locations.row(jj);
      const Eigen::RowVectorXd x0 = test.X.row(jj);
      const auto nb = knn.query({point.data(), static_cast<std::size_t>(point.size())}, m);
      const auto g = geometry(point, train.locations, nb);
      Eigen::VectorXd y_nb(static_cast<Eigen::Index>(m));
      Eigen::MatrixXd x_nb(static_cast<Eigen::Index>(m), ncoef);
      for (std::size_t a = 0; a < m; ++a) {
        y_nb(static_cast<Eigen::Index>(a)) = train.y(nb[a]);
        x_nb.row(static_cast<Eigen::Index>(a)) = train.X.row(nb[a]);
      }
      double first = 0.0, second = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        const auto row = draws.row(static_cast<Eigen::Index>(kept[s]));
        const Eigen::VectorXd beta = row.head(ncoef).transpose();
        const Kriging k = krige_local(g, y_nb, x_nb, x0, beta, row(ncoef), row(ncoef + 1), row(ncoef + 2), kernel.family);
        means[s] = k.mean;
        sds[s] = std::sqrt(k.var);
        first += k.mean;
        second += k.var + k.mean * k.mean;
      }
      const double mu = first / static_cast<double>(S);
      out.mean(jj) = mu;
      out.sd(jj) = std::sqrt(std::max(0.0, second / static_cast<double>(S) - mu * mu));
      out.lower(jj) = mixture_quantile(means, sds, 0.025);
      out.upper(jj) = mixture_quantile(means, sds, 0.975);
      if (options.keep_draws) {
        std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(j)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> z(0.0, 1.0);
        for (std::size_t s = 0; s < S; ++s) out.draws(jj, static_cast<Eigen::Index>(s)) = means[s] + sds[s] * z(rng);
      }
    }
  });
  return out;
}

} // namespace mbgp
