#include <doctest.h>

#include "ice/errors.hpp"
#include "ice/rng.hpp"
#include "ice/signal_io.hpp"
#include "ice/synth_oracle.hpp"

#include <cmath>
#include <filesystem>
#include <map>

using namespace ice;

namespace {

GazeTrace make_trace(std::size_t n, double fps, double x = 0.0, double y = 0.0) {
  GazeTrace t;
  t.nominal_fps = fps;
  for (std::size_t i = 0; i < n; ++i) t.frames.push_back({i, static_cast<double>(i) / fps, x, y, 1.0});
  return t;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an ice::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("three well-formed rows parse to three frames") {
  const std::string csv =
      "timestamp,confidence,gaze_angle_x,gaze_angle_y\n"
      "0.0,0.98,0.1,-0.2\n"
      "0.0667,0.97,0.11,-0.19\n"
      "0.1333,0.99,0.12,-0.18\n";
  LoadDiagnostics diag;
  const GazeTrace t = parse_gaze_csv(csv, {}, std::nullopt, &diag);
  REQUIRE(t.size() == 3);
  CHECK(t.frames[1].gaze_x == doctest::Approx(0.11));
  CHECK(t.frames[2].confidence == doctest::Approx(0.99));
  CHECK(diag.rows_dropped == 0);
  CHECK(diag.warnings.empty());
  CHECK(t.nominal_fps == doctest::Approx(1.0 / 0.0667).epsilon(0.01));
}

TEST_CASE("a NaN gaze row is dropped with one warning") {
  const std::string csv =
      "timestamp,confidence,gaze_angle_x,gaze_angle_y\n"
      "0.0,0.98,0.1,-0.2\n"
      "0.1,0.97,NaN,-0.19\n"
      "0.2,0.99,0.12,-0.18\n";
  LoadDiagnostics diag;
  const GazeTrace t = parse_gaze_csv(csv, {}, std::nullopt, &diag);
  CHECK(t.size() == 2);
  CHECK(diag.rows_dropped == 1);
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("descending timestamps come back ascending") {
  const std::string csv =
      "timestamp,confidence,gaze_angle_x,gaze_angle_y\n"
      "0.2,1,3,0\n"
      "0.1,1,2,0\n"
      "0.0,1,1,0\n";
  const GazeTrace t = parse_gaze_csv(csv);
  REQUIRE(t.size() == 3);
  CHECK(t.frames[0].timestamp == 0.0);
  CHECK(t.frames[0].gaze_x == 1.0);
  CHECK(t.frames[2].gaze_x == 3.0);
}

TEST_CASE("missing columns and empty traces are reported") {
  CHECK(kind_of([] { parse_gaze_csv("timestamp,confidence,gaze_angle_x\n0,1,0\n"); }) == ErrorKind::MissingColumn);
  CHECK(kind_of([] { parse_gaze_csv("timestamp,confidence,gaze_angle_x,gaze_angle_y\n"); }) == ErrorKind::EmptyTrace);
  CHECK(kind_of([] { parse_gaze_csv("timestamp,confidence,gaze_angle_x,gaze_angle_y\nx,1,0,0\n"); }) ==
        ErrorKind::EmptyTrace);
  CHECK(kind_of([] { load_gaze_csv("/nonexistent/gaze.csv"); }) == ErrorKind::Io);
}

TEST_CASE("custom schema without a confidence column") {
  GazeCsvSchema schema;
  schema.timestamp = "t";
  schema.gaze_x = "gx";
  schema.gaze_y = "gy";
  schema.confidence = "";
  const GazeTrace t = parse_gaze_csv("t,gx,gy\n0,1,2\n0.5,3,4\n", schema);
  REQUIRE(t.size() == 2);
  CHECK(t.frames[0].confidence == 1.0);
  CHECK(t.frames[1].gaze_y == 4.0);
}

TEST_CASE("spacing far from nominal warns but still loads") {
  LoadDiagnostics diag;
  const GazeTrace t = parse_gaze_csv(
      "timestamp,confidence,gaze_angle_x,gaze_angle_y\n0,1,0,0\n0.5,1,0,0\n1.0,1,0,0\n", {}, 15.0, &diag);
  CHECK(t.size() == 3);
  CHECK(t.nominal_fps == 15.0);
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("gaze CSV round trip is exact") {
  ScenarioSpec spec;
  spec.duration_seconds = 20;
  spec.rng_seed = 11;
  const GazeTrace original = generate(spec).trace;
  const GazeTrace back = parse_gaze_csv(format_gaze_csv(original), {}, original.nominal_fps);
  REQUIRE(back.size() == original.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.frames[i].timestamp == doctest::Approx(original.frames[i].timestamp).epsilon(1e-12));
    CHECK(std::abs(back.frames[i].gaze_x - original.frames[i].gaze_x) <= 1e-12);
    CHECK(std::abs(back.frames[i].gaze_y - original.frames[i].gaze_y) <= 1e-12);
    CHECK(std::abs(back.frames[i].confidence - original.frames[i].confidence) <= 1e-12);
  }
}

TEST_CASE("file round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "ice_signal_io_test";
  std::filesystem::create_directories(dir);
  const GazeTrace t = make_trace(10, 15.0, 0.25, -0.5);
  write_gaze_csv(dir / "g.csv", t);
  const GazeTrace back = load_gaze_csv(dir / "g.csv");
  CHECK(back.size() == 10);
  CHECK(back.frames[9].gaze_x == 0.25);

  EncodedTrace codes{{0.0, 1.0 / 3, 2.0 / 3}, {5, kMissingRegion, 8}};
  write_encoded_csv(dir / "e.csv", codes);
  const EncodedTrace codes_back = load_encoded_csv(dir / "e.csv");
  CHECK(codes_back.codes == codes.codes);
  CHECK(format_encoded_csv(codes).find("NA") != std::string::npos);

  GroundTruthTrace truth;
  truth.timestamps = {0.0, 0.1};
  truth.x = {1.0, 2.0};
  truth.y = {3.0, 4.0};
  truth.on_target = {true, false};
  write_ground_truth_csv(dir / "t.csv", truth);
  const GroundTruthTrace truth_back = load_ground_truth_csv(dir / "t.csv");
  CHECK(truth_back.x == truth.x);
  CHECK(truth_back.on_target == truth.on_target);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ground truth with only on_target flags") {
  const GroundTruthTrace t = parse_ground_truth_csv("timestamp,on_target\n0,1\n0.1,0\n0.2,1\n");
  CHECK_FALSE(t.has_coordinates());
  REQUIRE(t.has_on_target());
  CHECK(t.on_target == std::vector<bool>{true, false, true});
  CHECK(kind_of([] { parse_ground_truth_csv("timestamp,z\n0,1\n"); }) == ErrorKind::MissingColumn);
}

TEST_CASE("confidence filter") {
  SUBCASE("all confident frames pass unchanged") {
    const GazeTrace t = make_trace(5, 15.0);
    const FilteredTrace f = filter_confidence(t);
    CHECK(f.kept.frames == t.frames);
    CHECK(f.mask == MissingMask(5, false));
  }
  SUBCASE("the threshold itself is rejected") {
    GazeTrace t = make_trace(3, 15.0);
    t.frames[0].confidence = 0.95;
    t.frames[1].confidence = 0.9;
    t.frames[2].confidence = 0.85;
    const FilteredTrace f = filter_confidence(t, 0.9);
    REQUIRE(f.kept.size() == 1);
    CHECK(f.kept.frames[0].index == 0);
    CHECK(f.mask == MissingMask{false, true, true});
  }
  SUBCASE("nothing left") {
    GazeTrace t = make_trace(3, 15.0);
    for (auto& fr : t.frames) fr.confidence = 0.5;
    CHECK(kind_of([&] { filter_confidence(t); }) == ErrorKind::EmptyTrace);
  }
  SUBCASE("mask covers exactly the planted low-confidence frames") {
    ScenarioSpec spec;
    spec.duration_seconds = 120;
    spec.low_confidence_fraction = 0.1;
    spec.rng_seed = 5;
    const GazeTrace t = generate(spec).trace;
    const FilteredTrace f = filter_confidence(t);
    std::size_t planted = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      // The generator gives corrupted frames confidence below 0.9 and clean
      // ones at least 0.92.
      const bool corrupted = t.frames[i].confidence < 0.9;
      planted += corrupted ? 1 : 0;
      CHECK(f.mask[i] == corrupted);
    }
    CHECK(planted > 0);
  }
  SUBCASE("idempotent") {
    ScenarioSpec spec;
    spec.duration_seconds = 60;
    spec.low_confidence_fraction = 0.2;
    const GazeTrace t = generate(spec).trace;
    const FilteredTrace once = filter_confidence(t);
    const FilteredTrace twice = filter_confidence(once.kept);
    CHECK(twice.kept.frames == once.kept.frames);
    CHECK(twice.mask == MissingMask(once.kept.size(), false));
  }
}

TEST_CASE("raw downsampling") {
  SUBCASE("constant signal stays constant") {
    const GazeTrace t = make_trace(150, 15.0, 0.3, -0.1);
    const GazeTrace d = downsample_raw(t, 3.0);
    CHECK(d.size() == 30);
    for (const auto& f : d.frames) {
      CHECK(f.gaze_x == 0.3);
      CHECK(f.gaze_y == -0.1);
    }
  }
  SUBCASE("window mean") {
    GazeTrace t = make_trace(5, 15.0);
    for (std::size_t i = 0; i < 5; ++i) t.frames[i].gaze_x = 0.1 * static_cast<double>(i + 1);
    const GazeTrace d = downsample_raw(t, 3.0);
    REQUIRE(d.size() == 1);
    CHECK(d.frames[0].gaze_x == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.frames[0].timestamp == 0.0);
  }
  SUBCASE("60 fps sine against a direct windowed mean") {
    GazeTrace t;
    t.nominal_fps = 60.0;
    for (std::size_t i = 0; i < 6000; ++i) {
      const double ts = static_cast<double>(i) / 60.0;
      t.frames.push_back({i, ts, std::sin(2.0 * ts), std::cos(0.7 * ts), 1.0});
    }
    const GazeTrace d = downsample_raw(t, 3.0);
    REQUIRE(d.size() == 300);
    for (std::size_t w = 0; w < 300; ++w) {
      double sx = 0.0;
      for (std::size_t k = 0; k < 20; ++k) sx += std::sin(2.0 * static_cast<double>(w * 20 + k) / 60.0);
      CHECK(std::abs(d.frames[w].gaze_x - sx / 20.0) <= 1e-12);
    }
  }
  SUBCASE("output size bound and empty windows omitted") {
    GazeTrace t = make_trace(90, 15.0);
    t.frames.erase(t.frames.begin() + 20, t.frames.begin() + 40);
    const GazeTrace d = downsample_raw(t, 3.0);
    CHECK(d.size() <= static_cast<std::size_t>(std::ceil(t.duration() * 3.0)) + 1);
    CHECK(d.size() == 14);
  }
  SUBCASE("upsampling is refused") {
    const GazeTrace t = make_trace(10, 3.0);
    CHECK(kind_of([&] { downsample_raw(t, 15.0); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("encoded downsampling by majority") {
  auto window = [](std::vector<RegionCode> codes) {
    EncodedTrace e;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      e.timestamps.push_back(static_cast<double>(i) / 15.0);
      e.codes.push_back(codes[i]);
    }
    return downsample_encoded(e, 3.0).codes;
  };
  CHECK(window({5, 5, 5, 8, 8}) == std::vector<RegionCode>{5});
  CHECK(window({5, 8}) == std::vector<RegionCode>{5});
  CHECK(window({8, 5}) == std::vector<RegionCode>{5});
  CHECK(window({0, 0, 0, 9, 0}) == std::vector<RegionCode>{9});
  CHECK(window({0, 0, 0, 0, 0}) == std::vector<RegionCode>{kMissingRegion});

  SUBCASE("random windows against a count-all-codes oracle") {
    Rng rng(3);
    EncodedTrace e;
    for (std::size_t i = 0; i < 3000; ++i) {
      e.timestamps.push_back(static_cast<double>(i) / 15.0);
      e.codes.push_back(static_cast<RegionCode>(rng.below(10)));
    }
    const EncodedTrace d = downsample_encoded(e, 3.0);
    REQUIRE(d.size() == 600);
    for (std::size_t w = 0; w < 600; ++w) {
      std::map<int, int> counts;
      for (std::size_t k = 0; k < 5; ++k) {
        if (e.codes[w * 5 + k] != 0) ++counts[e.codes[w * 5 + k]];
      }
      int expected = 0;
      int best = 0;
      for (auto [code, c] : counts) {
        if (c > best) {
          best = c;
          expected = code;
        }
      }
      CHECK(d.codes[w] == expected);
    }
  }
}

TEST_CASE("flag downsampling ties to false") {
  const std::vector<double> ts{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<bool> v{true, false, true, true, false, false};
  const FlagSeries f = downsample_flags(ts, v, 5.0, 0.0);  // windows of 0.2 s
  CHECK(f.values == std::vector<bool>{false, true, false});
}

TEST_CASE("window index at exact edges") {
  CHECK(window_index(1.0, 0.0, 3.0) == 3);
  CHECK(window_index(1.0 / 3.0, 0.0, 3.0) == 1);
  CHECK(window_index(0.999, 0.0, 3.0) == 2);
}
