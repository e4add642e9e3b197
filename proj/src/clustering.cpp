#include "ice/clustering.hpp"

#include "ice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace ice {

int ClusterLabeling::largest_cluster() const noexcept {
  int best = kNoise;
  std::size_t best_size = 0;
  for (std::size_t k = 0; k < cluster_sizes.size(); ++k) {
    if (cluster_sizes[k] > best_size) {
      best = static_cast<int>(k);
      best_size = cluster_sizes[k];
    }
  }
  return best;
}

namespace {

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(const Point2& p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  [[nodiscard]] bool empty() const { return x0 > x1; }
};

// Distances below are all squared and computed with the same subtraction
// pattern as the pointwise test, so box bounds never disagree with it.
double sq(double v) { return v * v; }

double dist2(const Point2& a, const Point2& b) { return sq(a.x - b.x) + sq(a.y - b.y); }

double min_dist2(const Point2& p, const Box& b) {
  const double cx = std::clamp(p.x, b.x0, b.x1);
  const double cy = std::clamp(p.y, b.y0, b.y1);
  return sq(p.x - cx) + sq(p.y - cy);
}

double max_dist2(const Point2& p, const Box& b) {
  const double dx = std::max(std::abs(p.x - b.x0), std::abs(p.x - b.x1));
  const double dy = std::max(std::abs(p.y - b.y0), std::abs(p.y - b.y1));
  return sq(dx) + sq(dy);
}

double max_dist2(const Box& a, const Box& b) {
  const double dx = std::max(std::abs(a.x1 - b.x0), std::abs(a.x0 - b.x1));
  const double dy = std::max(std::abs(a.y1 - b.y0), std::abs(a.y0 - b.y1));
  return sq(dx) + sq(dy);
}

double min_dist2(const Box& a, const Box& b) {
  const double dx = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
  const double dy = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
  return sq(dx) + sq(dy);
}

struct Cell {
  std::int64_t cx = 0;
  std::int64_t cy = 0;
  std::vector<std::size_t> points;
  std::vector<std::size_t> cores;
  Box box;
  Box core_box;
  std::vector<std::size_t> neighbours;  // cell ids within two cells, self included
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<Cell> build_grid(std::span<const Point2> points, double side) {
  double min_x = points[0].x, min_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
  }
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint64_t>(cy & 0xffffffff);
  };

  std::vector<Cell> cells;
  std::unordered_map<std::uint64_t, std::size_t> lookup;
  lookup.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor((points[i].x - min_x) / side));
    const auto cy = static_cast<std::int64_t>(std::floor((points[i].y - min_y) / side));
    auto [it, inserted] = lookup.try_emplace(key(cx, cy), cells.size());
    if (inserted) {
      cells.emplace_back();
      cells.back().cx = cx;
      cells.back().cy = cy;
    }
    Cell& c = cells[it->second];
    c.points.push_back(i);
    c.box.add(points[i]);
  }
  for (std::size_t id = 0; id < cells.size(); ++id) {
    Cell& c = cells[id];
    for (std::int64_t dx = -2; dx <= 2; ++dx) {
      for (std::int64_t dy = -2; dy <= 2; ++dy) {
        if (auto it = lookup.find(key(c.cx + dx, c.cy + dy)); it != lookup.end()) {
          c.neighbours.push_back(it->second);
        }
      }
    }
    std::sort(c.neighbours.begin(), c.neighbours.end());
  }
  return cells;
}

}  // namespace

ClusterLabeling dbscan(std::span<const Point2> points, const DbscanParams& params) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "dbscan needs at least one point");
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "dbscan epsilon must be positive and finite");
  }
  if (params.min_pts < 1) throw Error(ErrorKind::InvalidArgument, "dbscan min_pts must be >= 1");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::InvalidArgument, "dbscan points must be finite");
    }
  }

  const std::size_t n = points.size();
  const double eps2 = params.epsilon * params.epsilon;
  // Cells spanning more than the epsilon-ball width would break the
  // two-cell neighbour radius, so the side is eps/sqrt(2) at most.
  std::vector<Cell> cells = build_grid(points, params.epsilon / std::sqrt(2.0));
  std::vector<std::size_t> cell_of(n);
  for (std::size_t id = 0; id < cells.size(); ++id) {
    for (std::size_t i : cells[id].points) cell_of[i] = id;
  }

  // Core flags, counting neighbours until min_pts is reached.
  std::vector<char> core(n, 0);
  for (Cell& a : cells) {
    std::vector<std::size_t> whole;  // neighbour cells entirely inside every point's ball
    std::vector<std::size_t> partial;
    std::size_t whole_count = 0;
    for (std::size_t bid : a.neighbours) {
      const Cell& b = cells[bid];
      if (max_dist2(a.box, b.box) <= eps2) {
        whole.push_back(bid);
        whole_count += b.points.size();
      } else if (min_dist2(a.box, b.box) <= eps2) {
        partial.push_back(bid);
      }
    }
    for (std::size_t i : a.points) {
      std::size_t count = whole_count;
      for (std::size_t bid : partial) {
        if (count >= params.min_pts) break;
        const Cell& b = cells[bid];
        const Point2& p = points[i];
        if (max_dist2(p, b.box) <= eps2) {
          count += b.points.size();
        } else if (min_dist2(p, b.box) <= eps2) {
          for (std::size_t j : b.points) {
            if (dist2(p, points[j]) <= eps2) ++count;
          }
        }
      }
      if (count >= params.min_pts) core[i] = 1;
    }
  }
  for (Cell& c : cells) {
    for (std::size_t i : c.points) {
      if (core[i]) {
        c.cores.push_back(i);
        c.core_box.add(points[i]);
      }
    }
  }

  // Connected components of the core graph.
  DisjointSet sets(n);
  for (std::size_t aid = 0; aid < cells.size(); ++aid) {
    const Cell& a = cells[aid];
    if (a.cores.empty()) continue;
    for (std::size_t bid : a.neighbours) {
      if (bid < aid) continue;
      const Cell& b = cells[bid];
      if (b.cores.empty()) continue;
      if (max_dist2(a.core_box, b.core_box) <= eps2) {
        for (std::size_t i : a.cores) sets.unite(i, b.cores.front());
        for (std::size_t j : b.cores) sets.unite(j, b.cores.front());
        continue;
      }
      if (min_dist2(a.core_box, b.core_box) > eps2) continue;
      for (std::size_t i : a.cores) {
        const Point2& p = points[i];
        if (min_dist2(p, b.core_box) > eps2) continue;
        for (std::size_t j : b.cores) {
          if (i == j) continue;
          if (sets.find(i) != sets.find(j) && dist2(p, points[j]) <= eps2) sets.unite(i, j);
        }
      }
    }
  }

  ClusterLabeling out;
  out.labels.assign(n, ClusterLabeling::kNoise);
  std::vector<int> root_label(n, ClusterLabeling::kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const std::size_t r = sets.find(i);
    if (root_label[r] == ClusterLabeling::kNoise) {
      root_label[r] = static_cast<int>(out.cluster_sizes.size());
      out.cluster_sizes.push_back(0);
    }
    out.labels[i] = root_label[r];
  }

  // Border points take the earliest-discovered cluster among their core
  // neighbours.
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    const Point2& p = points[i];
    int best = std::numeric_limits<int>::max();
    for (std::size_t bid : cells[cell_of[i]].neighbours) {
      const Cell& b = cells[bid];
      if (b.cores.empty() || min_dist2(p, b.core_box) > eps2) continue;
      for (std::size_t j : b.cores) {
        if (out.labels[j] < best && dist2(p, points[j]) <= eps2) best = out.labels[j];
      }
      if (best == 0) break;
    }
    if (best != std::numeric_limits<int>::max()) out.labels[i] = best;
  }

  for (int label : out.labels) {
    if (label == ClusterLabeling::kNoise) {
      ++out.noise_count;
    } else {
      ++out.cluster_sizes[static_cast<std::size_t>(label)];
    }
  }
  return out;
}

}  // namespace ice
