#pragma once

#include "ice/clustering.hpp"
#include "ice/ice_core.hpp"
#include "ice/signal_io.hpp"

#include <cstdint>
#include <vector>

namespace ice {

/// An axis-aligned gaze target: samples fall uniformly in center +/- spread.
struct SecondaryCluster {
  Point2 center;
  Point2 spread;  // half-widths, radians
  double fraction = 0.0;
  friend bool operator==(const SecondaryCluster&, const SecondaryCluster&) = default;
};

struct ScenarioSpec {
  double duration_seconds = 600.0;
  double fps = 15.0;

  double partner_fraction = 0.8;
  Point2 partner_center{0.0, 0.0};
  Point2 partner_spread{0.08, 0.06};
  std::vector<SecondaryCluster> secondary_clusters{
      {{-0.35, 0.02}, {0.04, 0.04}, 0.05},
      {{0.35, 0.0}, {0.04, 0.04}, 0.05},
      {{0.0, 0.32}, {0.06, 0.03}, 0.05},
  };
  // Whatever mass the partner and secondaries leave is spread over the
  // field as well, so this is a floor on the noise share.
  double uniform_noise_fraction = 0.05;
  Point2 field_min{-0.6, -0.45};
  Point2 field_max{0.6, 0.45};

  double measurement_noise_sigma = 0.005;
  double low_confidence_fraction = 0.02;
  double mean_dwell_seconds = 0.5;

  // The reference tracker sees the true gaze, mapped affinely into its own
  // units, on a clock running planted_lag_seconds ahead of the video.
  double planted_lag_seconds = 0.0;
  double tracker_scale = 1.0;
  Point2 tracker_offset{0.0, 0.0};

  std::uint64_t rng_seed = 0;

  /// Throws InvalidSpec when an invariant does not hold.
  void validate() const;
  /// The planted region of primary engagement: the partner's box.
  [[nodiscard]] RveBox planted_rve() const;
  [[nodiscard]] std::size_t frame_count() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct LabeledTrace {
  static constexpr int kPartner = 0;
  static constexpr int kNoise = -1;

  GazeTrace trace;
  std::vector<Point2> true_gaze;         // before measurement noise and dropouts
  std::vector<int> truth_component;      // kPartner, 1..m for secondaries, kNoise
  std::vector<RegionCode> truth_region;  // 1..9 under the planted RVE, y down
  GroundTruthTrace tracker;              // x, y and on_target on the tracker clock

  [[nodiscard]] std::vector<bool> truth_on_target() const;
};

/// Draws a trace from the component mixture with dwell runs: a component is
/// picked with probability equal to its fraction and held for a geometric
/// number of frames with mean mean_dwell_seconds * fps. Partner and secondary
/// frames fall uniformly in their box; a noise run fixates one uniform point
/// of the field. Pure given spec.rng_seed.
LabeledTrace generate(const ScenarioSpec& spec);

}  // namespace ice
