#include "mbgp/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "mbgp/error.hpp"
#include "mbgp/simd.hpp"

namespace mbgp {

namespace {

struct Candidate {
  double d2;
  Index j;
  friend bool operator<(const Candidate& a, const Candidate& b) {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.j < b.j);
  }
};

// Keeps the k smallest candidates in ascending order.
class TopK {
public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void offer(double d2, Index j) {
    const Candidate c{d2, j};
    if (items_.size() == k_ && !(c < items_.back())) return;
    items_.insert(std::upper_bound(items_.begin(), items_.end(), c), c);
    if (items_.size() > k_) items_.pop_back();
  }
  [[nodiscard]] bool full() const noexcept { return items_.size() == k_; }
  [[nodiscard]] double worst() const noexcept { return items_.back().d2; }
  [[nodiscard]] const std::vector<Candidate>& items() const noexcept { return items_; }
  void clear() { items_.clear(); }

private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

std::vector<const double*> column_pointers(const Eigen::MatrixXd& m) {
  std::vector<const double*> cols(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.cols(); ++k) cols[static_cast<std::size_t>(k)] = m.col(k).data();
  return cols;
}

double squared_distance(const Eigen::MatrixXd& m, Index a, const double* point) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double diff = m(a, k) - point[k];
    acc += diff * diff;
  }
  return acc;
}

} // namespace

namespace detail {

// Uniform grid over 2-d points with members of each cell listed by index.
struct UniformGrid {
  double x0 = 0, y0 = 0, cell = 1;
  std::size_t nx = 1, ny = 1;
  std::vector<std::size_t> start;
  std::vector<Index> members;

  static UniformGrid build(const Eigen::MatrixXd& pts, double per_cell) {
    UniformGrid g;
    const auto n = static_cast<double>(pts.rows());
    g.x0 = pts.col(0).minCoeff();
    g.y0 = pts.col(1).minCoeff();
    const double wx = pts.col(0).maxCoeff() - g.x0;
    const double wy = pts.col(1).maxCoeff() - g.y0;
    const double area = wx * wy;
    g.cell = area > 0.0 ? std::sqrt(area * per_cell / n) : std::max(wx, wy) * per_cell / n;
    if (!(g.cell > 0.0)) g.cell = 1.0;
    g.nx = static_cast<std::size_t>(wx / g.cell) + 1;
    g.ny = static_cast<std::size_t>(wy / g.cell) + 1;
    std::vector<std::size_t> count(g.nx * g.ny + 1, 0);
    std::vector<std::size_t> cell_of(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const std::size_t c = g.cell_index(pts(i, 0), pts(i, 1));
      cell_of[static_cast<std::size_t>(i)] = c;
      ++count[c + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    g.start = count;
    g.members.resize(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) g.members[count[cell_of[static_cast<std::size_t>(i)]]++] = i;
    return g;
  }

  [[nodiscard]] std::size_t clamp_cell(double v, double origin, std::size_t extent) const {
    const double c = std::floor((v - origin) / cell);
    if (!(c > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(c), extent - 1);
  }
  [[nodiscard]] std::size_t cell_index(double x, double y) const {
    return clamp_cell(y, y0, ny) * nx + clamp_cell(x, x0, nx);
  }

  // Offers every point with index < limit, ring by ring around the query cell,
  // until no unvisited cell can hold anything closer than the current k-th.
  void query(const Eigen::MatrixXd& pts, const double* point, Index limit, TopK& top) const {
    const auto cx = static_cast<std::ptrdiff_t>(clamp_cell(point[0], x0, nx));
    const auto cy = static_cast<std::ptrdiff_t>(clamp_cell(point[1], y0, ny));
    const auto max_ring = static_cast<std::ptrdiff_t>(std::max(nx, ny));
    auto visit = [&](std::ptrdiff_t ix, std::ptrdiff_t iy) {
      if (ix < 0 || iy < 0 || ix >= static_cast<std::ptrdiff_t>(nx) || iy >= static_cast<std::ptrdiff_t>(ny)) return;
      const std::size_t c = static_cast<std::size_t>(iy) * nx + static_cast<std::size_t>(ix);
      for (std::size_t m = start[c]; m < start[c + 1]; ++m) {
        const Index j = members[m];
        if (j >= limit) break;
        top.offer(squared_distance(pts, j, point), j);
      }
    };
    for (std::ptrdiff_t r = 0; r <= max_ring; ++r) {
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        if (dy == -r || dy == r) {
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) visit(cx + dx, cy + dy);
        } else {
          visit(cx - r, cy + dy);
          if (r > 0) visit(cx + r, cy + dy);
        }
      }
      const double reach = static_cast<double>(r) * cell;
      if (top.full() && top.worst() < reach * reach * (1.0 - 1e-9)) return;
    }
  }
};

} // namespace detail

namespace {

using detail::UniformGrid;

void brute_force_query(const std::vector<const double*>& cols, const double* point, std::size_t count,
                       std::vector<double>& scratch, TopK& top) {
  scratch.resize(count);
  simd::active().squared_distances(cols.data(), cols.size(), point, count, scratch.data());
  for (std::size_t j = 0; j < count; ++j) top.offer(scratch[j], static_cast<Index>(j));
}

} // namespace

std::string_view to_string(OrderingScheme scheme) noexcept {
  switch (scheme) {
  case OrderingScheme::as_given: return "as-given";
  case OrderingScheme::coordinate_sum: return "coordinate-sum";
  case OrderingScheme::maxmin: return "maxmin";
  case OrderingScheme::random: return "random";
  }
  return "unknown";
}

OrderingScheme parse_ordering(std::string_view name) {
  if (name == "as-given" || name == "asGiven" || name == "none") return OrderingScheme::as_given;
  if (name == "coordinate-sum" || name == "coordinateSum") return OrderingScheme::coordinate_sum;
  if (name == "maxmin") return OrderingScheme::maxmin;
  if (name == "random") return OrderingScheme::random;
  throw InputError("unknown ordering scheme '" + std::string(name) + "'");
}

std::vector<Index> order_observations(const Eigen::MatrixXd& locations, OrderingScheme scheme,
                                      std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(locations.rows());
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  switch (scheme) {
  case OrderingScheme::as_given:
    break;
  case OrderingScheme::coordinate_sum: {
    const Eigen::VectorXd sums = locations.rowwise().sum();
    std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) { return sums(a) < sums(b); });
    break;
  }
  case OrderingScheme::random: {
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    break;
  }
  case OrderingScheme::maxmin: {
    if (n == 0) break;
    const auto cols = column_pointers(locations);
    const Eigen::RowVectorXd centroid = locations.colwise().mean();
    std::vector<double> d2(n);
    simd::active().squared_distances(cols.data(), cols.size(), centroid.data(), n, d2.data());
    Index current = static_cast<Index>(std::min_element(d2.begin(), d2.end()) - d2.begin());

    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    std::vector<bool> placed(n, false);
    Eigen::RowVectorXd point(locations.cols());
    for (std::size_t k = 0; k < n; ++k) {
      perm[k] = current;
      placed[static_cast<std::size_t>(current)] = true;
      if (k + 1 == n) break;
      point = locations.row(current);
      simd::active().squared_distances(cols.data(), cols.size(), point.data(), n, d2.data());
      double best = -1.0;
      Index best_j = -1;
      for (std::size_t j = 0; j < n; ++j) {
        if (placed[j]) continue;
        min_d2[j] = std::min(min_d2[j], d2[j]);
        if (min_d2[j] > best) {
          best = min_d2[j];
          best_j = static_cast<Index>(j);
        }
      }
      current = best_j;
    }
    break;
  }
  }
  return perm;
}

NeighborGraph::NeighborGraph(std::vector<Index> perm, std::size_t max_neighbors, OrderingScheme scheme,
                             std::vector<std::size_t> offsets, std::vector<Index> neighbors)
    : perm_(std::move(perm)), max_neighbors_(max_neighbors), scheme_(scheme), offsets_(std::move(offsets)),
      neighbors_(std::move(neighbors)) {}

NeighborGraph build_neighbor_sets(const Eigen::MatrixXd& ordered, std::size_t max_neighbors, NeighborSearch search,
                                  std::vector<Index> perm, OrderingScheme scheme) {
  require(max_neighbors >= 1, "neighbor count M must be at least 1");
  const auto n = static_cast<std::size_t>(ordered.rows());
  if (perm.empty()) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), Index{0});
  }
  require(perm.size() == n, "permutation length does not match the locations");

  bool use_grid = search == NeighborSearch::grid ||
                  (search == NeighborSearch::automatic && n > kGridSearchThreshold);
  if (ordered.cols() != 2) use_grid = false;

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + std::min(max_neighbors, i);
  std::vector<Index> neighbors(offsets[n]);

  const auto cols = column_pointers(ordered);
  UniformGrid grid;
  std::size_t brute_below = n;
  if (use_grid) {
    grid = UniformGrid::build(ordered, 2.0);
    brute_below = std::min<std::size_t>(
        n, static_cast<std::size_t>(2.0 * std::sqrt(static_cast<double>(max_neighbors) * static_cast<double>(n))));
  }

  std::vector<double> scratch;
  Eigen::RowVectorXd point(ordered.cols());
  TopK top(max_neighbors);
  for (std::size_t i = 1; i < n; ++i) {
    top.clear();
    point = ordered.row(static_cast<Eigen::Index>(i));
    if (i < brute_below) {
      brute_force_query(cols, point.data(), i, scratch, top);
    } else {
      grid.query(ordered, point.data(), static_cast<Index>(i), top);
    }
    const auto& items = top.items();
    for (std::size_t k = 0; k < items.size(); ++k) neighbors[offsets[i] + k] = items[k].j;
  }
  return NeighborGraph(std::move(perm), max_neighbors, scheme, std::move(offsets), std::move(neighbors));
}

void write_neighbor_graph(std::ostream& out, const NeighborGraph& graph) {
  out << "mbgp-neighbor-graph 1\n";
  out << "n " << graph.size() << "\n";
  out << "M " << graph.max_neighbors() << "\n";
  out << "scheme " << to_string(graph.scheme()) << "\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto nb = graph.of(i);
    out << i << ' ' << graph.perm()[i] << ' ' << nb.size();
    for (Index j : nb) out << ' ' << j;
    out << '\n';
  }
  if (!out) throw IoError("failed writing neighbor graph");
}

NeighborGraph read_neighbor_graph(std::istream& in) {
  std::string magic, key, scheme_name;
  int version = 0;
  std::size_t n = 0, m = 0;
  if (!(in >> magic >> version) || magic != "mbgp-neighbor-graph" || version != 1)
    throw IoError("not a neighbor graph file");
  if (!(in >> key >> n) || key != "n") throw IoError("neighbor graph: missing n");
  if (!(in >> key >> m) || key != "M") throw IoError("neighbor graph: missing M");
  if (!(in >> key >> scheme_name) || key != "scheme") throw IoError("neighbor graph: missing scheme");
  std::vector<Index> perm(n);
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<Index> neighbors;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0, count = 0;
    if (!(in >> idx >> perm[i] >> count) || idx != i) throw IoError("neighbor graph: bad line " + std::to_string(i));
    if (count > m || count > i) throw IoError("neighbor graph: too many neighbors on line " + std::to_string(i));
    for (std::size_t k = 0; k < count; ++k) {
      Index j = 0;
      if (!(in >> j) || j < 0 || static_cast<std::size_t>(j) >= i)
        throw IoError("neighbor graph: invalid neighbor on line " + std::to_string(i));
      neighbors.push_back(j);
    }
    offsets[i + 1] = neighbors.size();
  }
  return NeighborGraph(std::move(perm), m, parse_ordering(scheme_name), std::move(offsets), std::move(neighbors));
}

KnnIndex::KnnIndex(const Eigen::MatrixXd& reference) : ref_(reference) {
  if (ref_.cols() == 2 && static_cast<std::size_t>(ref_.rows()) > 256)
    grid_ = std::make_shared<const UniformGrid>(UniformGrid::build(ref_, 2.0));
}

std::vector<Index> KnnIndex::query(std::span<const double> point, std::size_t k) const {
  require(point.size() == static_cast<std::size_t>(ref_.cols()), "query dimension mismatch");
  k = std::min<std::size_t>(k, static_cast<std::size_t>(ref_.rows()));
  std::vector<Index> out;
  if (k == 0) return out;
  TopK top(k);
  if (grid_) {
    grid_->query(ref_, point.data(), static_cast<Index>(ref_.rows()), top);
  } else {
    const auto cols = column_pointers(ref_);
    std::vector<double> scratch;
    brute_force_query(cols, point.data(), static_cast<std::size_t>(ref_.rows()), scratch, top);
  }
  out.reserve(top.items().size());
  for (const auto& c : top.items()) out.push_back(c.j);
  return out;
}

} // namespace mbgp
