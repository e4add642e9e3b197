#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ice {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct DbscanParams {
  double epsilon = 0.0;   // neighbourhood radius, closed ball
  std::size_t min_pts = 1;  // neighbourhood size (self included) that makes a point core
};

struct ClusterLabeling {
  static constexpr int kNoise = -1;

  std::vector<int> labels;                 // per point: kNoise or 0..K-1
  std::vector<std::size_t> cluster_sizes;  // indexed by cluster label
  std::size_t noise_count = 0;

  [[nodiscard]] std::size_t cluster_count() const noexcept { return cluster_sizes.size(); }
  /// Number of distinct labels, counting noise as one label when present.
  [[nodiscard]] std::size_t distinct_labels() const noexcept {
    return cluster_sizes.size() + (noise_count > 0 ? 1 : 0);
  }
  [[nodiscard]] std::size_t size_of(int label) const {
    return label == kNoise ? noise_count : cluster_sizes.at(static_cast<std::size_t>(label));
  }
  /// Largest non-noise cluster (lowest label on ties), or kNoise if none.
  [[nodiscard]] int largest_cluster() const noexcept;
};

/// Exact DBSCAN with Euclidean distance.
///
/// A point is core when its closed epsilon-ball holds at least min_pts
/// points, itself included. Clusters are the connected components of the
/// core points, numbered in order of their lowest-index core point, which is
/// the order a scan in index order discovers them. A border point within
/// reach of several clusters joins the earliest-discovered one.
///
/// Neighbourhoods are found through a uniform grid of cell side eps/sqrt(2)
/// with bounding-box pruning, so dense inputs at large eps stay cheap. The
/// result is identical to a pairwise scan.
ClusterLabeling dbscan(std::span<const Point2> points, const DbscanParams& params);

}  // namespace ice
