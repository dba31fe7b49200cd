#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mbgp/model.hpp"

namespace mbgp {

namespace detail {
struct UniformGrid;
}

enum class OrderingScheme { as_given, coordinate_sum, maxmin, random };

std::string_view to_string(OrderingScheme scheme) noexcept;
OrderingScheme parse_ordering(std::string_view name);

/// Permutation of the rows of `locations`: entry k is the original row placed
/// at position k. Ties are always broken by the smaller original index.
///   maxmin: start from the point nearest the centroid, then repeatedly take
///           the point farthest from everything already ordered.
///   random: seeded shuffle.
std::vector<Index> order_observations(const Eigen::MatrixXd& locations, OrderingScheme scheme,
                                      std::uint64_t seed = 0);

enum class NeighborSearch { automatic, brute_force, grid };

/// Conditioning sets of the Vecchia factorization. Position i conditions on
/// the min(M, i) positions j < i nearest to it, listed by increasing distance
/// (ties by smaller position).
class NeighborGraph {
public:
  NeighborGraph() = default;
  NeighborGraph(std::vector<Index> perm, std::size_t max_neighbors, OrderingScheme scheme,
                std::vector<std::size_t> offsets, std::vector<Index> neighbors);

  [[nodiscard]] std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  [[nodiscard]] std::size_t max_neighbors() const noexcept { return max_neighbors_; }
  [[nodiscard]] OrderingScheme scheme() const noexcept { return scheme_; }
  [[nodiscard]] const std::vector<Index>& perm() const noexcept { return perm_; }

  [[nodiscard]] std::span<const Index> of(std::size_t i) const noexcept {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Start of entry i in the flattened neighbor list.
  [[nodiscard]] std::size_t offset(std::size_t i) const noexcept { return offsets_[i]; }
  [[nodiscard]] std::size_t total_neighbors() const noexcept { return neighbors_.size(); }

  friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

private:
  std::vector<Index> perm_;
  std::size_t max_neighbors_ = 0;
  OrderingScheme scheme_ = OrderingScheme::as_given;
  std::vector<std::size_t> offsets_;
  std::vector<Index> neighbors_;
};

/// Neighbor sets for locations that are already in conditioning order. The
/// returned graph carries `perm`/`scheme` as metadata only.
NeighborGraph build_neighbor_sets(const Eigen::MatrixXd& ordered_locations, std::size_t max_neighbors,
                                  NeighborSearch search = NeighborSearch::automatic,
                                  std::vector<Index> perm = {},
                                  OrderingScheme scheme = OrderingScheme::as_given);

/// Size above which the automatic search switches from brute force to the
/// uniform grid (two-dimensional data only).
inline constexpr std::size_t kGridSearchThreshold = 5000;

void write_neighbor_graph(std::ostream& out, const NeighborGraph& graph);
NeighborGraph read_neighbor_graph(std::istream& in);

/// Exact k-nearest-neighbor queries against a fixed reference set, used for
/// prediction at new locations. Ties by smaller reference index.
class KnnIndex {
public:
  explicit KnnIndex(const Eigen::MatrixXd& reference);

  [[nodiscard]] std::vector<Index> query(std::span<const double> point, std::size_t k) const;

private:
  Eigen::MatrixXd ref_;
  std::shared_ptr<const detail::UniformGrid> grid_; // 2-d references only
};

} // namespace mbgp
