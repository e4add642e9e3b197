#include "ice/sync_align.hpp"

#include "ice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace ice {

namespace {

std::vector<double> zscore(std::span<const double> s, const char* name) {
  const auto n = static_cast<double>(s.size());
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error(ErrorKind::DegenerateSignal, std::string(name) + " has zero variance");
  }
  std::vector<double> z(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) z[i] = (s[i] - mean) / sd;
  return z;
}

std::optional<double> overlap_pearson(const std::vector<double>& a, const std::vector<double>& b,
                                      std::size_t a0, std::size_t b0, std::size_t len) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    ma += a[a0 + i];
    mb += b[b0 + i];
  }
  ma /= static_cast<double>(len);
  mb /= static_cast<double>(len);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double da = a[a0 + i] - ma;
    const double db = b[b0 + i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

SyncResult synchronize(std::span<const double> a, std::span<const double> b,
                       const SyncOptions& options) {
  if (!(options.fps > 0.0)) throw Error(ErrorKind::InvalidArgument, "sync fps must be positive");
  if (!(options.max_lag_seconds >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "max_lag_seconds must be non-negative");
  }
  if (a.size() < 3 || b.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "signals need more than two samples");
  }
  const std::vector<double> za = zscore(a, "first signal");
  const std::vector<double> zb = zscore(b, "second signal");
  const std::size_t min_overlap = std::max<std::size_t>(options.min_overlap, 3);

  const auto max_lag = static_cast<std::int64_t>(std::floor(options.max_lag_seconds * options.fps + 1e-9));
  const std::int64_t min_lag = options.symmetric ? -max_lag : 0;

  SyncResult result;
  bool found = false;
  for (std::int64_t k = min_lag; k <= max_lag; ++k) {
    const std::size_t a0 = k < 0 ? static_cast<std::size_t>(-k) : 0;
    const std::size_t b0 = k > 0 ? static_cast<std::size_t>(k) : 0;
    if (a0 >= za.size() || b0 >= zb.size()) continue;
    const std::size_t len = std::min(za.size() - a0, zb.size() - b0);
    if (len < min_overlap) continue;
    const auto r = overlap_pearson(za, zb, a0, b0, len);
    if (!r) continue;
    const double lag_s = static_cast<double>(k) / options.fps;
    result.curve.push_back({lag_s, *r});
    const bool better = !found || *r > result.correlation_at_lag ||
                        (*r == result.correlation_at_lag && std::llabs(k) < std::llabs(result.lag_samples));
    if (better) {
      found = true;
      result.correlation_at_lag = *r;
      result.lag_samples = k;
      result.lag_seconds = lag_s;
    }
  }
  if (!found) {
    throw Error(ErrorKind::DegenerateSignal, "no lag has enough overlapping samples with variance");
  }
  return result;
}

Axis select_sync_dimension(const GazeTrace& trace) {
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "cannot pick a sync axis of an empty trace");
  const auto n = static_cast<double>(trace.size());
  double mx = 0.0, my = 0.0;
  for (const auto& f : trace.frames) {
    mx += f.gaze_x;
    my += f.gaze_y;
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0;
  for (const auto& f : trace.frames) {
    vx += (f.gaze_x - mx) * (f.gaze_x - mx);
    vy += (f.gaze_y - my) * (f.gaze_y - my);
  }
  return vx > vy ? Axis::X : Axis::Y;
}

std::vector<double> dense_signal(const GazeTrace& downsampled, Axis axis, double fps, double origin) {
  if (downsampled.empty()) return {};
  std::vector<std::int64_t> idx;
  idx.reserve(downsampled.size());
  for (const auto& f : downsampled.frames) idx.push_back(window_index(f.timestamp, origin, fps));
  const std::int64_t last = idx.back();
  if (idx.front() < 0) throw Error(ErrorKind::InvalidArgument, "trace starts before the origin");
  std::vector<double> out(static_cast<std::size_t>(last + 1));
  auto value = [&](std::size_t i) {
    return axis == Axis::X ? downsampled.frames[i].gaze_x : downsampled.frames[i].gaze_y;
  };
  std::size_t j = 0;
  double current = value(0);
  for (std::int64_t w = 0; w <= last; ++w) {
    while (j < idx.size() && idx[j] <= w) {
      current = value(j);
      ++j;
    }
    out[static_cast<std::size_t>(w)] = current;
  }
  return out;
}

}  // namespace ice
