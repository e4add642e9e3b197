#include "ice/serialization.hpp"

#include "ice/errors.hpp"

namespace ice {

using nlohmann::json;

namespace {

template <class T>
void read_optional(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const Point2& p) { j = json::array({p.x, p.y}); }

void from_json(const json& j, Point2& p) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::InvalidArgument, "a point is a two-element array");
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
}

void to_json(json& j, AxisConvention a) { j = a == AxisConvention::YUp ? "y_up" : "y_down"; }

void from_json(const json& j, AxisConvention& a) {
  const auto s = j.get<std::string>();
  if (s == "y_up") a = AxisConvention::YUp;
  else if (s == "y_down") a = AxisConvention::YDown;
  else throw Error(ErrorKind::InvalidArgument, "unknown axis convention '" + s + "'");
}

void to_json(json& j, const IceConfig& c) {
  j = json{{"epsilon_start", c.epsilon_start},
           {"epsilon_step", c.epsilon_step},
           {"epsilon_floor_fallback", c.epsilon_floor_fallback},
           {"dominance_ratio", c.dominance_ratio},
           {"min_pts_fraction", c.min_pts_fraction},
           {"axis_convention", c.axis_convention}};
}

void from_json(const json& j, IceConfig& c) {
  read_optional(j, "epsilon_start", c.epsilon_start);
  read_optional(j, "epsilon_step", c.epsilon_step);
  read_optional(j, "epsilon_floor_fallback", c.epsilon_floor_fallback);
  read_optional(j, "dominance_ratio", c.dominance_ratio);
  read_optional(j, "min_pts_fraction", c.min_pts_fraction);
  read_optional(j, "axis_convention", c.axis_convention);
}

void to_json(json& j, const RveBox& b) {
  j = json{{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min}, {"y_max", b.y_max}};
}

void from_json(const json& j, RveBox& b) {
  j.at("x_min").get_to(b.x_min);
  j.at("x_max").get_to(b.x_max);
  j.at("y_min").get_to(b.y_min);
  j.at("y_max").get_to(b.y_max);
}

void to_json(json& j, const IceEncoder& e) {
  j = json{{"rve", e.rve},
           {"epsilon", e.chosen_epsilon},
           {"min_pts", e.chosen_min_pts},
           {"calibration_frame_count", e.calibration_frame_count},
           {"config", e.config}};
}

void from_json(const json& j, IceEncoder& e) {
  j.at("rve").get_to(e.rve);
  j.at("epsilon").get_to(e.chosen_epsilon);
  j.at("min_pts").get_to(e.chosen_min_pts);
  j.at("calibration_frame_count").get_to(e.calibration_frame_count);
  read_optional(j, "config", e.config);
}

void to_json(json& j, const ConfusionCounts& c) {
  j = json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

void to_json(json& j, const EvalReport& r) {
  j = json{{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
           {"mcc", r.mcc},           {"n_frames", r.n_frames},    {"degenerate", r.degenerate}};
}

void to_json(json& j, const SyncResult& r) {
  j = json{{"lag_seconds", r.lag_seconds},
           {"lag_samples", r.lag_samples},
           {"correlation_at_lag", r.correlation_at_lag}};
}

void from_json(const json& j, SyncResult& r) {
  j.at("lag_seconds").get_to(r.lag_seconds);
  read_optional(j, "lag_samples", r.lag_samples);
  read_optional(j, "correlation_at_lag", r.correlation_at_lag);
}

void to_json(json& j, const TTestResult& r) {
  j = json{{"t", r.t_stat},
           {"df", r.df},
           {"p", r.p_two_tailed},
           {"cohens_d", r.cohens_d},
           {"bonferroni_threshold", r.bonferroni_threshold},
           {"significant", r.significant_bonferroni},
           {"mean_a", r.mean_a},
           {"mean_b", r.mean_b},
           {"sd_a", r.sd_a},
           {"sd_b", r.sd_b},
           {"n_a", r.n_a},
           {"n_b", r.n_b}};
}

void to_json(json& j, Regularization r) { j = r == Regularization::L1 ? "l1" : "l2"; }

void from_json(const json& j, Regularization& r) {
  const auto s = j.get<std::string>();
  if (s == "l1") r = Regularization::L1;
  else if (s == "l2") r = Regularization::L2;
  else throw Error(ErrorKind::InvalidArgument, "unknown regularization '" + s + "'");
}

void to_json(json& j, const LinearModel& m) {
  j = json{{"features", m.feature_names},
           {"weights", m.weights},
           {"bias", m.bias},
           {"regularization", m.regularization},
           {"lambda", m.lambda},
           {"feature_means", m.feature_means},
           {"feature_stds", m.feature_stds}};
}

void from_json(const json& j, LinearModel& m) {
  j.at("features").get_to(m.feature_names);
  j.at("weights").get_to(m.weights);
  j.at("bias").get_to(m.bias);
  j.at("regularization").get_to(m.regularization);
  j.at("lambda").get_to(m.lambda);
  j.at("feature_means").get_to(m.feature_means);
  j.at("feature_stds").get_to(m.feature_stds);
  const std::size_t p = m.feature_names.size();
  if (m.weights.size() != p || m.feature_means.size() != p || m.feature_stds.size() != p) {
    throw Error(ErrorKind::InvalidArgument, "model arrays disagree in length");
  }
}

void to_json(json& j, const SecondaryCluster& c) {
  j = json{{"center", c.center}, {"spread", c.spread}, {"fraction", c.fraction}};
}

void from_json(const json& j, SecondaryCluster& c) {
  j.at("center").get_to(c.center);
  j.at("spread").get_to(c.spread);
  j.at("fraction").get_to(c.fraction);
}

void to_json(json& j, const ScenarioSpec& s) {
  j = json{{"duration_seconds", s.duration_seconds},
           {"fps", s.fps},
           {"partner_fraction", s.partner_fraction},
           {"partner_center", s.partner_center},
           {"partner_spread", s.partner_spread},
           {"secondary_clusters", s.secondary_clusters},
           {"uniform_noise_fraction", s.uniform_noise_fraction},
           {"field_min", s.field_min},
           {"field_max", s.field_max},
           {"measurement_noise_sigma", s.measurement_noise_sigma},
           {"low_confidence_fraction", s.low_confidence_fraction},
           {"mean_dwell_seconds", s.mean_dwell_seconds},
           {"planted_lag_seconds", s.planted_lag_seconds},
           {"tracker_scale", s.tracker_scale},
           {"tracker_offset", s.tracker_offset},
           {"rng_seed", s.rng_seed}};
}

void from_json(const json& j, ScenarioSpec& s) {
  read_optional(j, "duration_seconds", s.duration_seconds);
  read_optional(j, "fps", s.fps);
  read_optional(j, "partner_fraction", s.partner_fraction);
  read_optional(j, "partner_center", s.partner_center);
  read_optional(j, "partner_spread", s.partner_spread);
  read_optional(j, "secondary_clusters", s.secondary_clusters);
  read_optional(j, "uniform_noise_fraction", s.uniform_noise_fraction);
  read_optional(j, "field_min", s.field_min);
  read_optional(j, "field_max", s.field_max);
  read_optional(j, "measurement_noise_sigma", s.measurement_noise_sigma);
  read_optional(j, "low_confidence_fraction", s.low_confidence_fraction);
  read_optional(j, "mean_dwell_seconds", s.mean_dwell_seconds);
  read_optional(j, "planted_lag_seconds", s.planted_lag_seconds);
  read_optional(j, "tracker_scale", s.tracker_scale);
  read_optional(j, "tracker_offset", s.tracker_offset);
  read_optional(j, "rng_seed", s.rng_seed);
}

}  // namespace ice
