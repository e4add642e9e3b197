#pragma once

#include "ice/clustering.hpp"
#include "ice/signal_io.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ice {

/// Which way positive gaze_y points. Image-style extractors report y growing
/// downward, which puts "looking down" in region 8.
enum class AxisConvention { YDown, YUp };

struct IceConfig {
  double epsilon_start = 1.0;
  double epsilon_step = 0.01;
  double epsilon_floor_fallback = 0.001;
  double dominance_ratio = 10.0;
  double min_pts_fraction = 0.01;
  AxisConvention axis_convention = AxisConvention::YDown;

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;

  friend bool operator==(const IceConfig&, const IceConfig&) = default;
};

/// Region of primary visual engagement: the centre cell of the 3x3 grid.
struct RveBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  [[nodiscard]] bool contains(double x, double y) const noexcept {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  friend bool operator==(const RveBox&, const RveBox&) = default;
};

struct IceEncoder {
  RveBox rve;
  IceConfig config;
  double chosen_epsilon = 0.0;
  std::size_t chosen_min_pts = 1;
  std::size_t calibration_frame_count = 0;

  friend bool operator==(const IceEncoder&, const IceEncoder&) = default;
};

/// Outcome of the descending epsilon search.
struct EpsilonSearchResult {
  double epsilon = 0.0;
  ClusterLabeling labeling;
  bool used_fallback = false;
};

/// Message carried by every FAIL outcome.
inline constexpr std::string_view kFailReason = "cannot find more than 1 cluster";

std::size_t select_min_pts(std::size_t n_frames, double fraction);

/// Candidate radii, largest first: (S - k) * step for k = 0..S-1 with
/// S = round(start / step). Integer stepping keeps the grid free of
/// accumulated rounding.
std::vector<double> epsilon_grid(const IceConfig& config);

/// True when the labeling has at least two labels (noise counts as one),
/// the two largest labels are within `dominance_ratio` of each other, and
/// the largest label is a real cluster rather than noise.
bool is_dominant_split(const ClusterLabeling& labeling, double dominance_ratio);

/// Runs DBSCAN down the epsilon grid and returns the first (largest) radius
/// whose labeling is a dominant split. When no grid radius qualifies, a single
/// retry at `epsilon_floor_fallback` is accepted if it yields two or more
/// labels. Returns nullopt on FAIL.
std::optional<EpsilonSearchResult> search_epsilon(std::span<const Point2> points,
                                                  const IceConfig& config, std::size_t min_pts);

/// Bounding box of the members of `label`.
RveBox cluster_bounding_box(std::span<const Point2> points, const ClusterLabeling& labeling,
                            int label);

std::vector<Point2> gaze_points(const GazeTrace& trace);

/// Calibrates on the whole (already confidence-filtered) trace. nullopt on FAIL.
std::optional<IceEncoder> fit_encoder(const GazeTrace& trace, const IceConfig& config = {});

/// Calibrates on frames with timestamp - t_first < prefix_seconds. Throws
/// EmptyPrefix when the prefix is shorter than one frame period or selects
/// no frames.
std::optional<IceEncoder> fit_encoder_prefix(const GazeTrace& trace, const IceConfig& config,
                                             double prefix_seconds);

/// Region 1..9 of one gaze point, row-major from the top-left cell. The RVE
/// interval is closed on both ends.
RegionCode encode_point(const RveBox& rve, AxisConvention axis, double gaze_x, double gaze_y);

/// Encodes every frame of `trace`; frames flagged in `mask` become Missing.
/// An empty mask flags nothing.
EncodedTrace encode(const IceEncoder& encoder, const GazeTrace& trace, const MissingMask& mask = {});

struct RegionHistogram {
  std::array<std::size_t, 9> counts{};
  std::array<double, 9> freq{};
  std::size_t total = 0;  // non-Missing frames

  /// Relative frequency of region 1..9.
  [[nodiscard]] double operator[](int region) const { return freq.at(static_cast<std::size_t>(region - 1)); }
};

RegionHistogram region_histogram(const EncodedTrace& codes);

}  // namespace ice
