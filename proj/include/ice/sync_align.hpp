#pragma once

#include "ice/signal_io.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ice {

enum class Axis { X, Y };

struct SyncOptions {
  double fps = 3.0;
  double max_lag_seconds = 300.0;
  bool symmetric = false;        // also test negative lags
  std::size_t min_overlap = 10;  // lags with fewer overlapping samples are skipped
};

struct LagCorrelation {
  double lag_seconds = 0.0;
  double correlation = 0.0;
};

struct SyncResult {
  double lag_seconds = 0.0;
  std::int64_t lag_samples = 0;
  double correlation_at_lag = 0.0;
  std::vector<LagCorrelation> curve;
};

/// Normalised cross-correlation lag search. At lag k >= 0 sample b[i + k] is
/// paired with a[i]; the Pearson correlation is taken over the overlap only.
/// Returns the lag of maximum correlation, preferring the smallest |lag| on
/// ties. Both inputs must share one sampling rate, `options.fps`.
SyncResult synchronize(std::span<const double> a, std::span<const double> b,
                       const SyncOptions& options = {});

/// Axis with the larger sample variance; y on ties.
Axis select_sync_dimension(const GazeTrace& trace);

/// Regularly sampled copy of one gaze axis of a downsampled trace, one sample
/// per window from window 0 (at `origin`) to the last occupied window. Empty
/// windows repeat the previous sample; leading ones take the first sample.
std::vector<double> dense_signal(const GazeTrace& downsampled, Axis axis, double fps,
                                 double origin = 0.0);

}  // namespace ice
