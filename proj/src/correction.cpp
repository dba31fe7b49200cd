#include "mbgp/correction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mbgp/error.hpp"
#include "mbgp/format.hpp"

namespace mbgp {

namespace {

// Weight of the soft sum-to-one row. Large enough to pin the total mass,
// small enough to leave the Gram matrix workable.
constexpr double kSumWeight = 100.0;

std::vector<double> uniform_grid(double lo, double hi, double step) {
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j) g[j] = lo + static_cast<double>(j) * step;
  return g;
}

Eigen::MatrixXd design(double c, const std::vector<double>& z, const std::vector<double>& x) {
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * c);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double d = z[k] - x[j];
      A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = norm * std::exp(-0.5 * d * d / c);
    }
  return A;
}

// Lawson-Hanson active set for min 0.5 h'Gh - r'h subject to h >= 0.
Eigen::VectorXd nnls_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& r) {
  const Eigen::Index n = G.rows();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  const double tol = 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff());
  const Eigen::Index max_outer = 3 * n;

  auto solve_passive = [&](std::vector<Eigen::Index>& idx) {
    idx.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Gp(k, k);
    Eigen::VectorXd rp(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      rp(a) = r(idx[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < k; ++b) Gp(a, b) = G(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::VectorXd s = Gp.ldlt().solve(rp);
    return s;
  };

  std::vector<Eigen::Index> idx;
  for (Eigen::Index outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = r - G * h;
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) return h;
    passive[static_cast<std::size_t>(best)] = 1;

    for (Eigen::Index inner = 0; inner <= n; ++inner) {
      const Eigen::VectorXd s = solve_passive(idx);
      if (!s.allFinite()) throw NumericalError("correction fit: singular passive system");
      double alpha = 1.0;
      bool feasible = true;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const double sa = s(static_cast<Eigen::Index>(a));
        if (sa <= 0.0) {
          feasible = false;
          const double ha = h(idx[a]);
          alpha = std::min(alpha, ha / (ha - sa));
        }
      }
      if (feasible) {
        for (std::size_t a = 0; a < idx.size(); ++a) h(idx[a]) = s(static_cast<Eigen::Index>(a));
        break;
      }
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const Eigen::Index j = idx[a];
        h(j) += alpha * (s(static_cast<Eigen::Index>(a)) - h(j));
        if (h(j) <= 1e-15 * std::max(1.0, h.maxCoeff())) {
          h(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = 0;
        }
      }
    }
  }
  throw NumericalError("correction fit: active-set iterations exhausted");
}

} // namespace

std::vector<double> CorrectionGrid::support() const { return uniform_grid(lo, hi, support_step); }
std::vector<double> CorrectionGrid::evaluation() const { return uniform_grid(lo, hi, eval_step); }

void CorrectionGrid::validate() const {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "correction grid bounds must satisfy lo < hi");
  require(support_step > 0.0 && eval_step > 0.0, "correction grid steps must be positive");
  require((hi - lo) / support_step <= 1e5 && (hi - lo) / eval_step <= 1e6, "correction grid too fine");
}

CorrectionDistribution::CorrectionDistribution(double c, CorrectionGrid grid, double lambda, std::vector<double> mass,
                                               double sup_error)
    : c_(c), grid_(grid), lambda_(lambda), support_(grid.support()), mass_(std::move(mass)), sup_error_(sup_error) {
  require(c > 0.0 && c <= 3.0, "correction variance c must lie in (0, 3]");
  require(mass_.size() == support_.size(), "correction mass does not match its grid");
  double total = 0.0;
  for (double m : mass_) {
    require(m >= 0.0 && std::isfinite(m), "correction mass must be nonnegative");
    total += m;
  }
  require(std::abs(total - 1.0) < 1e-9, "correction mass must sum to 1");
  cdf_.resize(mass_.size());
  std::partial_sum(mass_.begin(), mass_.end(), cdf_.begin());
}

double CorrectionDistribution::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < mass_.size(); ++j) m += support_[j] * mass_[j];
  return m;
}

double CorrectionDistribution::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, cdf_.back());
  const double target = u(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  auto j = static_cast<std::size_t>(it - cdf_.begin());
  if (j >= mass_.size()) j = mass_.size() - 1;
  // Never land on a zero-mass point (possible only at exact cdf ties).
  while (mass_[j] == 0.0 && j + 1 < mass_.size()) ++j;
  return support_[j];
}

double logistic_density(double z) noexcept {
  const double e = std::exp(-std::abs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

double correction_sup_error(double c, const CorrectionGrid& grid, const std::vector<double>& mass) {
  const auto x = grid.support();
  const auto z = grid.evaluation();
  require(mass.size() == x.size(), "correction mass does not match its grid");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * c);
  double worst = 0.0;
  for (double zk : z) {
    double f = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (mass[j] == 0.0) continue;
      const double d = zk - x[j];
      f += mass[j] * norm * std::exp(-0.5 * d * d / c);
    }
    worst = std::max(worst, std::abs(f - logistic_density(zk)));
  }
  return worst;
}

CorrectionFit fit_correction(double c, double lambda, const CorrectionGrid& grid) {
  require(c > 0.0 && c <= 3.0, "correction variance c must lie in (0, 3]");
  require(lambda >= 0.0, "lambda must be nonnegative");
  grid.validate();
  const auto x = grid.support();
  const auto z = grid.evaluation();
  const Eigen::MatrixXd A = design(c, z, x);
  Eigen::VectorXd ell(static_cast<Eigen::Index>(z.size()));
  for (std::size_t k = 0; k < z.size(); ++k) ell(static_cast<Eigen::Index>(k)) = logistic_density(z[k]);

  const double w2 = kSumWeight * kSumWeight;
  Eigen::MatrixXd G = A.transpose() * A;
  G.array() += w2;
  Eigen::VectorXd r = A.transpose() * ell;
  r.array() += w2 - lambda;

  Eigen::VectorXd h = nnls_gram(G, r);
  const double total = h.sum();
  if (!(total > 0.0)) throw NumericalError("correction fit returned no mass");
  h /= total;

  CorrectionFit fit;
  fit.mass.assign(h.data(), h.data() + h.size());
  fit.active = static_cast<std::size_t>((h.array() > 0.0).count());
  fit.sup_error = correction_sup_error(c, grid, fit.mass);
  return fit;
}

const std::vector<double>& lambda_ladder() {
  static const std::vector<double> ladder{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0};
  return ladder;
}

double select_lambda(const CorrectionGrid& grid) {
  // The error grows with lambda, so bisect for the first passing rung.
  const auto& ladder = lambda_ladder();
  std::size_t lo = 0;
  std::size_t hi = ladder.size() - 1;
  if (fit_correction(1.0, ladder[hi], grid).sup_error > 0.01)
    throw NumericalError("correction fit cannot reach 0.01 at c = 1 even without penalty");
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (fit_correction(1.0, ladder[mid], grid).sup_error <= 0.01)
      hi = mid;
    else
      lo = mid + 1;
  }
  return ladder[lo];
}

CorrectionDistribution estimate_correction_distribution(double c, const CorrectionGrid& grid,
                                                        std::optional<double> lambda) {
  require(c > 0.0 && c <= 3.0, "correction variance c must lie in (0, 3]");
  const double lam = lambda ? *lambda : select_lambda(grid);
  CorrectionFit fit = fit_correction(c, lam, grid);
  if (!(fit.sup_error <= kCertificationThreshold))
    throw NumericalError("correction distribution for c = " + format_double(c) + " has sup-error " +
                         format_double(fit.sup_error) + " above the certification threshold");
  return {c, grid, lam, std::move(fit.mass), fit.sup_error};
}

void write_correction(std::ostream& out, const CorrectionDistribution& cd) {
  const auto& g = cd.grid();
  out << "mbgp-correction 1\n"
      << "c " << format_double(cd.c()) << '\n'
      << "lo " << format_double(g.lo) << '\n'
      << "hi " << format_double(g.hi) << '\n'
      << "support_step " << format_double(g.support_step) << '\n'
      << "eval_step " << format_double(g.eval_step) << '\n'
      << "lambda " << format_double(cd.lambda()) << '\n'
      << "sup_error " << format_double(cd.sup_error()) << '\n'
      << "points " << cd.mass().size() << '\n';
  for (std::size_t j = 0; j < cd.mass().size(); ++j)
    out << format_double(cd.support()[j]) << ' ' << format_double(cd.mass()[j]) << '\n';
  if (!out) throw IoError("failed writing correction distribution");
}

CorrectionDistribution read_correction(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string_view what) {
    if (!std::getline(in, line)) throw IoError("correction file truncated before " + std::string(what));
    return line;
  };
  if (next_line("header") != "mbgp-correction 1") throw IoError("not a correction distribution file");
  auto field = [&](std::string_view key) {
    std::istringstream ss(next_line(key));
    std::string k, v, extra;
    if (!(ss >> k >> v) || k != key || (ss >> extra)) throw IoError("expected field '" + std::string(key) + "'");
    return parse_double(v, key);
  };
  const double c = field("c");
  CorrectionGrid g;
  g.lo = field("lo");
  g.hi = field("hi");
  g.support_step = field("support_step");
  g.eval_step = field("eval_step");
  const double lambda = field("lambda");
  const double sup = field("sup_error");
  const double points = field("points");
  try {
    g.validate();
  } catch (const InputError& e) {
    throw IoError(std::string("correction file: ") + e.what());
  }
  const auto support = g.support();
  if (points != static_cast<double>(support.size())) throw IoError("correction file: point count does not match grid");
  std::vector<double> mass(support.size());
  for (std::size_t j = 0; j < support.size(); ++j) {
    std::istringstream ss(next_line("mass"));
    std::string xs, ms, extra;
    if (!(ss >> xs >> ms) || (ss >> extra)) throw IoError("correction file: malformed row " + std::to_string(j));
    if (parse_double(xs, "support point") != support[j])
      throw IoError("correction file: support point " + std::to_string(j) + " off grid");
    mass[j] = parse_double(ms, "mass");
  }
  if (!(sup <= kCertificationThreshold)) throw IoError("correction file: recorded sup-error exceeds threshold");
  try {
    return {c, g, lambda, std::move(mass), sup};
  } catch (const InputError& e) {
    throw IoError(std::string("correction file: ") + e.what());
  }
}

} // namespace mbgp
