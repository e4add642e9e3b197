#pragma once

// JSON forms of the pipeline's result types, found by nlohmann::json through
// argument-dependent lookup.

#include "ice/evaluation.hpp"
#include "ice/ice_core.hpp"
#include "ice/stat_models.hpp"
#include "ice/sync_align.hpp"
#include "ice/synth_oracle.hpp"

#include <json.hpp>

namespace ice {

void to_json(nlohmann::json& j, const Point2& p);
void from_json(const nlohmann::json& j, Point2& p);

void to_json(nlohmann::json& j, AxisConvention a);
void from_json(const nlohmann::json& j, AxisConvention& a);

void to_json(nlohmann::json& j, const IceConfig& c);
void from_json(const nlohmann::json& j, IceConfig& c);

void to_json(nlohmann::json& j, const RveBox& b);
void from_json(const nlohmann::json& j, RveBox& b);

void to_json(nlohmann::json& j, const IceEncoder& e);
void from_json(const nlohmann::json& j, IceEncoder& e);

void to_json(nlohmann::json& j, const ConfusionCounts& c);
void to_json(nlohmann::json& j, const EvalReport& r);

// The curve is left out; it is written as CSV next to the summary.
void to_json(nlohmann::json& j, const SyncResult& r);
void from_json(const nlohmann::json& j, SyncResult& r);

void to_json(nlohmann::json& j, const TTestResult& r);

void to_json(nlohmann::json& j, Regularization r);
void from_json(const nlohmann::json& j, Regularization& r);
void to_json(nlohmann::json& j, const LinearModel& m);
void from_json(const nlohmann::json& j, LinearModel& m);

void to_json(nlohmann::json& j, const SecondaryCluster& c);
void from_json(const nlohmann::json& j, SecondaryCluster& c);
void to_json(nlohmann::json& j, const ScenarioSpec& s);
// Keys that are absent keep their defaults, so partial specs are accepted.
void from_json(const nlohmann::json& j, ScenarioSpec& s);

}  // namespace ice
