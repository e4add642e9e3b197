#include "ice/synth_oracle.hpp"

#include "ice/errors.hpp"
#include "ice/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ice {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, what);
}

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Point2 uniform_in_box(Rng& rng, Point2 center, Point2 spread) {
  const double x = rng.uniform(center.x - spread.x, center.x + spread.x);
  const double y = rng.uniform(center.y - spread.y, center.y + spread.y);
  return {x, y};
}

}  // namespace

void ScenarioSpec::validate() const {
  require(std::isfinite(duration_seconds) && duration_seconds > 0.0, "duration_seconds must be positive");
  require(std::isfinite(fps) && fps > 0.0, "fps must be positive");
  require(frame_count() >= 1, "scenario has no frames");
  require(partner_fraction > 0.0 && partner_fraction <= 1.0, "partner_fraction must lie in (0, 1]");
  require(finite(partner_center) && finite(partner_spread), "partner geometry must be finite");
  require(partner_spread.x > 0.0 && partner_spread.y > 0.0, "partner spread must be positive");
  double total = partner_fraction;
  for (const auto& c : secondary_clusters) {
    require(finite(c.center) && finite(c.spread), "secondary geometry must be finite");
    require(c.spread.x > 0.0 && c.spread.y > 0.0, "secondary spread must be positive");
    require(c.fraction >= 0.0 && c.fraction <= 1.0, "secondary fraction must lie in [0, 1]");
    total += c.fraction;
  }
  require(uniform_noise_fraction >= 0.0 && uniform_noise_fraction <= 1.0,
          "uniform_noise_fraction must lie in [0, 1]");
  total += uniform_noise_fraction;
  require(total <= 1.0 + 1e-9, "component fractions sum above 1");
  require(finite(field_min) && finite(field_max) && field_min.x < field_max.x && field_min.y < field_max.y,
          "noise field must be a non-empty box");
  require(std::isfinite(measurement_noise_sigma) && measurement_noise_sigma >= 0.0,
          "measurement_noise_sigma must be non-negative");
  require(low_confidence_fraction >= 0.0 && low_confidence_fraction < 1.0,
          "low_confidence_fraction must lie in [0, 1)");
  require(std::isfinite(mean_dwell_seconds) && mean_dwell_seconds > 0.0, "mean_dwell_seconds must be positive");
  require(std::isfinite(planted_lag_seconds), "planted_lag_seconds must be finite");
  require(std::isfinite(tracker_scale) && tracker_scale != 0.0, "tracker_scale must be non-zero");
  require(finite(tracker_offset), "tracker_offset must be finite");
}

RveBox ScenarioSpec::planted_rve() const {
  return {partner_center.x - partner_spread.x, partner_center.x + partner_spread.x,
          partner_center.y - partner_spread.y, partner_center.y + partner_spread.y};
}

std::size_t ScenarioSpec::frame_count() const {
  return static_cast<std::size_t>(std::llround(duration_seconds * fps));
}

std::vector<bool> LabeledTrace::truth_on_target() const {
  std::vector<bool> out(truth_region.size());
  for (std::size_t i = 0; i < truth_region.size(); ++i) out[i] = truth_region[i] == kCenterRegion;
  return out;
}

LabeledTrace generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  const std::size_t n = spec.frame_count();
  const RveBox rve = spec.planted_rve();
  const double dwell_frames = std::max(1.0, spec.mean_dwell_seconds * spec.fps);

  // Cumulative mixture weights; the last slot (noise) absorbs the remainder.
  std::vector<double> cumulative;
  double acc = spec.partner_fraction;
  cumulative.push_back(acc);
  for (const auto& c : spec.secondary_clusters) {
    acc += c.fraction;
    cumulative.push_back(acc);
  }

  LabeledTrace out;
  out.trace.nominal_fps = spec.fps;
  out.trace.frames.reserve(n);
  out.true_gaze.reserve(n);
  out.truth_component.reserve(n);
  out.truth_region.reserve(n);

  std::size_t i = 0;
  while (i < n) {
    const double u = rng.uniform();
    int component = LabeledTrace::kNoise;
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
      if (u < cumulative[k]) {
        component = static_cast<int>(k);
        break;
      }
    }
    const std::size_t run = rng.geometric(dwell_frames);
    const Point2 fixation{rng.uniform(spec.field_min.x, spec.field_max.x),
                          rng.uniform(spec.field_min.y, spec.field_max.y)};

    for (std::size_t r = 0; r < run && i < n; ++r, ++i) {
      Point2 truth = fixation;
      if (component == LabeledTrace::kPartner) {
        truth = uniform_in_box(rng, spec.partner_center, spec.partner_spread);
      } else if (component > 0) {
        const auto& c = spec.secondary_clusters[static_cast<std::size_t>(component - 1)];
        truth = uniform_in_box(rng, c.center, c.spread);
      }
      // Every frame consumes the same draws whatever the settings, so
      // changing one noise level leaves the rest of the stream in place.
      const bool dropout = rng.uniform() < spec.low_confidence_fraction;
      const double conf_u = rng.uniform();
      const Point2 garbage{rng.uniform(spec.field_min.x, spec.field_max.x),
                           rng.uniform(spec.field_min.y, spec.field_max.y)};
      const double nx = rng.normal();
      const double ny = rng.normal();

      GazeFrame f;
      f.index = i;
      f.timestamp = static_cast<double>(i) / spec.fps;
      if (dropout) {
        f.confidence = 0.9 * conf_u;
        f.gaze_x = garbage.x;
        f.gaze_y = garbage.y;
      } else {
        f.confidence = 0.92 + 0.08 * conf_u;
        f.gaze_x = truth.x + spec.measurement_noise_sigma * nx;
        f.gaze_y = truth.y + spec.measurement_noise_sigma * ny;
      }
      out.trace.frames.push_back(f);
      out.true_gaze.push_back(truth);
      out.truth_component.push_back(component);
      out.truth_region.push_back(encode_point(rve, AxisConvention::YDown, truth.x, truth.y));
    }
  }

  GroundTruthTrace& tr = out.tracker;
  tr.timestamps.reserve(n);
  tr.x.reserve(n);
  tr.y.reserve(n);
  tr.on_target.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    tr.timestamps.push_back(out.trace.frames[k].timestamp + spec.planted_lag_seconds);
    tr.x.push_back(spec.tracker_scale * out.true_gaze[k].x + spec.tracker_offset.x);
    tr.y.push_back(spec.tracker_scale * out.true_gaze[k].y + spec.tracker_offset.y);
    tr.on_target.push_back(out.truth_region[k] == kCenterRegion);
  }
  return out;
}

}  // namespace ice
