#include <doctest.h>

#include "ice/errors.hpp"
#include "ice/synth_oracle.hpp"

#include <cmath>

using namespace ice;

TEST_CASE("all gaze on the partner puts every frame in region 5") {
  ScenarioSpec spec;
  spec.duration_seconds = 60;
  spec.partner_fraction = 1.0;
  spec.secondary_clusters.clear();
  spec.uniform_noise_fraction = 0.0;
  spec.measurement_noise_sigma = 0.0;
  spec.low_confidence_fraction = 0.0;
  const LabeledTrace lt = generate(spec);
  REQUIRE(lt.trace.size() == 900);
  for (std::size_t i = 0; i < lt.trace.size(); ++i) {
    CHECK(lt.truth_region[i] == 5);
    CHECK(lt.truth_component[i] == LabeledTrace::kPartner);
    CHECK(lt.trace.frames[i].gaze_x == lt.true_gaze[i].x);
  }
}

TEST_CASE("a fixed seed reproduces the trace and a new seed changes it") {
  ScenarioSpec spec;
  spec.duration_seconds = 30;
  spec.rng_seed = 77;
  const LabeledTrace a = generate(spec);
  const LabeledTrace b = generate(spec);
  CHECK(a.trace.frames == b.trace.frames);
  CHECK(a.truth_component == b.truth_component);
  CHECK(a.truth_region == b.truth_region);
  CHECK(a.tracker.x == b.tracker.x);
  spec.rng_seed = 78;
  CHECK_FALSE(generate(spec).trace.frames == a.trace.frames);
}

TEST_CASE("shapes, clocks and confidence") {
  ScenarioSpec spec;
  spec.duration_seconds = 40;
  spec.fps = 10;
  spec.planted_lag_seconds = 3.5;
  spec.tracker_scale = 2.0;
  spec.tracker_offset = {1.0, -1.0};
  const LabeledTrace lt = generate(spec);
  const std::size_t n = 400;
  REQUIRE(lt.trace.size() == n);
  CHECK(lt.true_gaze.size() == n);
  CHECK(lt.truth_component.size() == n);
  CHECK(lt.truth_region.size() == n);
  CHECK(lt.tracker.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    const GazeFrame& f = lt.trace.frames[i];
    CHECK(f.timestamp == static_cast<double>(i) / 10.0);
    CHECK(lt.tracker.timestamps[i] == f.timestamp + 3.5);
    CHECK(lt.tracker.x[i] == 2.0 * lt.true_gaze[i].x + 1.0);
    CHECK(lt.tracker.on_target[i] == (lt.truth_region[i] == 5));
    CHECK(f.confidence >= 0.0);
    CHECK(f.confidence <= 1.0);
  }
}

TEST_CASE("property: component fractions converge to the spec") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    ScenarioSpec spec;
    spec.fps = 3;
    spec.duration_seconds = 10000.0 / 3.0;
    spec.rng_seed = seed;
    const LabeledTrace lt = generate(spec);
    REQUIRE(lt.trace.size() == 10000);
    std::vector<double> share(spec.secondary_clusters.size() + 2, 0.0);  // noise, partner, secondaries
    std::size_t dropouts = 0;
    for (std::size_t i = 0; i < lt.trace.size(); ++i) {
      share[static_cast<std::size_t>(lt.truth_component[i] + 1)] += 1e-4;
      dropouts += lt.trace.frames[i].confidence <= 0.9 ? 1 : 0;
    }
    CHECK(std::abs(share[0] - 0.05) <= 0.02);
    CHECK(std::abs(share[1] - 0.8) <= 0.02);
    for (std::size_t k = 0; k < spec.secondary_clusters.size(); ++k) {
      CHECK(std::abs(share[k + 2] - spec.secondary_clusters[k].fraction) <= 0.02);
    }
    CHECK(std::abs(dropouts * 1e-4 - spec.low_confidence_fraction) <= 0.02);
  }
}

TEST_CASE("partner samples stay inside the planted box") {
  ScenarioSpec spec;
  spec.duration_seconds = 100;
  const LabeledTrace lt = generate(spec);
  const RveBox box = spec.planted_rve();
  CHECK(box == RveBox{-0.08, 0.08, -0.06, 0.06});
  for (std::size_t i = 0; i < lt.trace.size(); ++i) {
    if (lt.truth_component[i] == LabeledTrace::kPartner) CHECK(box.contains(lt.true_gaze[i].x, lt.true_gaze[i].y));
  }
}

TEST_CASE("invalid specs are rejected") {
  auto kind = [](ScenarioSpec s) {
    try {
      (void)generate(s);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  ScenarioSpec s;
  s.partner_fraction = 0.95;  // with 0.15 of secondaries and 0.05 noise
  CHECK(kind(s) == ErrorKind::InvalidSpec);
  s = {};
  s.partner_fraction = 0.0;
  CHECK(kind(s) == ErrorKind::InvalidSpec);
  s = {};
  s.partner_spread = {0.0, 0.1};
  CHECK(kind(s) == ErrorKind::InvalidSpec);
  s = {};
  s.secondary_clusters[0].spread = {-0.1, 0.1};
  CHECK(kind(s) == ErrorKind::InvalidSpec);
  s = {};
  s.fps = 0.0;
  CHECK(kind(s) == ErrorKind::InvalidSpec);
  s = {};
  s.low_confidence_fraction = 1.0;
  CHECK(kind(s) == ErrorKind::InvalidSpec);
}
