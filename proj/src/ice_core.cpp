#include "ice/ice_core.hpp"

#include "ice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ice {

void IceConfig::validate() const {
  if (!(epsilon_step > 0.0) || !(epsilon_start > epsilon_step)) {
    throw Error(ErrorKind::InvalidArgument, "require epsilon_start > epsilon_step > 0");
  }
  if (!(epsilon_floor_fallback > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon_floor_fallback must be positive");
  }
  if (!(dominance_ratio > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "dominance_ratio must exceed 1");
  }
  if (!(min_pts_fraction > 0.0 && min_pts_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_pts_fraction must lie in (0,1)");
  }
}

std::size_t select_min_pts(std::size_t n_frames, double fraction) {
  if (n_frames < 1) throw Error(ErrorKind::InvalidArgument, "select_min_pts needs n_frames >= 1");
  // The relative nudge absorbs products like 0.29 * 100 landing just below an integer.
  const double raw = static_cast<double>(n_frames) * fraction;
  const auto k = static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-12)));
  return std::max<std::size_t>(k, 1);
}

std::vector<double> epsilon_grid(const IceConfig& config) {
  config.validate();
  const auto steps = static_cast<long long>(std::llround(config.epsilon_start / config.epsilon_step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(std::max(steps, 0LL)));
  for (long long k = 0; k < steps; ++k) {
    grid.push_back(static_cast<double>(steps - k) * config.epsilon_step);
  }
  return grid;
}

bool is_dominant_split(const ClusterLabeling& labeling, double dominance_ratio) {
  if (labeling.distinct_labels() < 2) return false;
  std::vector<std::size_t> sizes = labeling.cluster_sizes;
  if (labeling.noise_count > 0) sizes.push_back(labeling.noise_count);
  std::partial_sort(sizes.begin(), sizes.begin() + 2, sizes.end(), std::greater<>());
  const int largest = labeling.largest_cluster();
  // Noise ties with the biggest cluster count as noise being largest.
  if (largest == ClusterLabeling::kNoise || labeling.size_of(largest) <= labeling.noise_count) {
    return false;
  }
  return static_cast<double>(sizes[0]) <= dominance_ratio * static_cast<double>(sizes[1]);
}

std::optional<EpsilonSearchResult> search_epsilon(std::span<const Point2> points,
                                                  const IceConfig& config, std::size_t min_pts) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "search_epsilon needs points");
  for (double eps : epsilon_grid(config)) {
    ClusterLabeling labeling = dbscan(points, {eps, min_pts});
    if (is_dominant_split(labeling, config.dominance_ratio)) {
      return EpsilonSearchResult{eps, std::move(labeling), false};
    }
  }
  ClusterLabeling labeling = dbscan(points, {config.epsilon_floor_fallback, min_pts});
  if (labeling.distinct_labels() < 2) return std::nullopt;
  return EpsilonSearchResult{config.epsilon_floor_fallback, std::move(labeling), true};
}

RveBox cluster_bounding_box(std::span<const Point2> points, const ClusterLabeling& labeling,
                            int label) {
  RveBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labeling.labels[i] != label) continue;
    any = true;
    box.x_min = std::min(box.x_min, points[i].x);
    box.x_max = std::max(box.x_max, points[i].x);
    box.y_min = std::min(box.y_min, points[i].y);
    box.y_max = std::max(box.y_max, points[i].y);
  }
  if (!any) throw Error(ErrorKind::InvalidArgument, "cluster label has no members");
  return box;
}

std::vector<Point2> gaze_points(const GazeTrace& trace) {
  std::vector<Point2> pts;
  pts.reserve(trace.size());
  for (const auto& f : trace.frames) pts.push_back({f.gaze_x, f.gaze_y});
  return pts;
}

std::optional<IceEncoder> fit_encoder(const GazeTrace& trace, const IceConfig& config) {
  config.validate();
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "cannot fit an encoder on an empty trace");
  const std::vector<Point2> pts = gaze_points(trace);
  const std::size_t min_pts = select_min_pts(pts.size(), config.min_pts_fraction);
  auto found = search_epsilon(pts, config, min_pts);
  if (!found) return std::nullopt;

  IceEncoder enc;
  enc.config = config;
  enc.chosen_epsilon = found->epsilon;
  enc.chosen_min_pts = min_pts;
  enc.calibration_frame_count = pts.size();
  enc.rve = cluster_bounding_box(pts, found->labeling, found->labeling.largest_cluster());
  return enc;
}

std::optional<IceEncoder> fit_encoder_prefix(const GazeTrace& trace, const IceConfig& config,
                                             double prefix_seconds) {
  if (!(prefix_seconds > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "prefix_seconds must be positive");
  }
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "cannot fit an encoder on an empty trace");
  if (trace.nominal_fps > 0.0 && prefix_seconds < 1.0 / trace.nominal_fps) {
    throw Error(ErrorKind::EmptyPrefix, "prefix is shorter than one frame period");
  }
  GazeTrace prefix;
  prefix.nominal_fps = trace.nominal_fps;
  const double t0 = trace.frames.front().timestamp;
  for (const auto& f : trace.frames) {
    if (f.timestamp - t0 < prefix_seconds) prefix.frames.push_back(f);
  }
  if (prefix.empty()) throw Error(ErrorKind::EmptyPrefix, "no frames inside the prefix window");
  return fit_encoder(prefix, config);
}

RegionCode encode_point(const RveBox& rve, AxisConvention axis, double gaze_x, double gaze_y) {
  const int col = gaze_x < rve.x_min ? 0 : (gaze_x <= rve.x_max ? 1 : 2);
  int row = gaze_y < rve.y_min ? 0 : (gaze_y <= rve.y_max ? 1 : 2);
  if (axis == AxisConvention::YUp) row = 2 - row;
  return static_cast<RegionCode>(3 * row + col + 1);
}

EncodedTrace encode(const IceEncoder& encoder, const GazeTrace& trace, const MissingMask& mask) {
  if (!mask.empty() && mask.size() != trace.size()) {
    throw Error(ErrorKind::LengthMismatch, "missing mask does not match trace length");
  }
  EncodedTrace out;
  out.timestamps.reserve(trace.size());
  out.codes.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const GazeFrame& f = trace.frames[i];
    out.timestamps.push_back(f.timestamp);
    if (!mask.empty() && mask[i]) {
      out.codes.push_back(kMissingRegion);
    } else {
      out.codes.push_back(encode_point(encoder.rve, encoder.config.axis_convention, f.gaze_x, f.gaze_y));
    }
  }
  return out;
}

RegionHistogram region_histogram(const EncodedTrace& codes) {
  RegionHistogram h;
  for (RegionCode c : codes.codes) {
    if (c == kMissingRegion) continue;
    ++h.counts[c - 1];
    ++h.total;
  }
  if (h.total == 0) throw Error(ErrorKind::AllMissing, "every frame is Missing");
  for (std::size_t k = 0; k < 9; ++k) {
    h.freq[k] = static_cast<double>(h.counts[k]) / static_cast<double>(h.total);
  }
  return h;
}

}  // namespace ice
