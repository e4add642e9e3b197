#pragma once

#include "ice/ice_core.hpp"
#include "ice/signal_io.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ice {

/// Binary agreement counts; the positive class is "on the RVE" (region 5).
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  std::size_t n_frames = 0;
  // Metrics whose denominator was zero; they are reported as 0.
  std::vector<std::string> degenerate;
};

/// Frames whose prediction is Missing are skipped.
ConfusionCounts confusion(const EncodedTrace& pred, const std::vector<bool>& truth);

EvalReport metrics(const ConfusionCounts& counts);

/// Video-clock truth sampled onto the prediction's windows.
struct AlignedEvaluation {
  EncodedTrace pred;
  std::vector<bool> truth;
};

/// Shifts truth timestamps by -lag_seconds into the prediction's clock, then
/// majority-votes both series into 1/fps windows anchored at time 0 and keeps
/// the windows present in both.
AlignedEvaluation align_for_evaluation(const EncodedTrace& pred, std::span<const double> truth_timestamps,
                                       const std::vector<bool>& truth_on_target, double lag_seconds,
                                       double fps);

/// On-target flags for coordinate ground truth: membership in `face_box`.
std::vector<bool> on_target_from_box(const GroundTruthTrace& truth, const RveBox& face_box);

double pearson(std::span<const double> a, std::span<const double> b);

struct RatingRow {
  int rating = 0;
  std::size_t count = 0;
  double mean_rve = 0.0;
};

struct RatingCorrelation {
  double per_recording_r = 0.0;
  double per_rating_mean_r = 0.0;
  std::vector<RatingRow> table;  // ascending rating
};

/// Correlates per-recording RVE fractions with ordinal ratings, both
/// per recording and over the per-rating means.
RatingCorrelation rating_correlation(std::span<const double> rve_fractions, std::span<const int> ratings);

}  // namespace ice
