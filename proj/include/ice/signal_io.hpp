#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ice {

/// One video frame of camera-relative gaze, angles in radians.
struct GazeFrame {
  std::size_t index = 0;
  double timestamp = 0.0;
  double gaze_x = 0.0;
  double gaze_y = 0.0;
  double confidence = 1.0;

  friend bool operator==(const GazeFrame&, const GazeFrame&) = default;
};

/// Frames ordered by strictly increasing timestamp.
struct GazeTrace {
  std::vector<GazeFrame> frames;
  double nominal_fps = 15.0;

  [[nodiscard]] std::size_t size() const noexcept { return frames.size(); }
  [[nodiscard]] bool empty() const noexcept { return frames.empty(); }
  [[nodiscard]] double duration() const noexcept {
    return frames.empty() ? 0.0 : frames.back().timestamp - frames.front().timestamp;
  }
};

/// Per-frame flag over an unfiltered trace; true marks a frame that must be
/// reported as Missing downstream.
using MissingMask = std::vector<bool>;

/// Region codes 1..9 in row-major order over the 3x3 grid; 0 is Missing.
using RegionCode = std::uint8_t;
inline constexpr RegionCode kMissingRegion = 0;
inline constexpr RegionCode kCenterRegion = 5;

struct EncodedTrace {
  std::vector<double> timestamps;
  std::vector<RegionCode> codes;

  [[nodiscard]] std::size_t size() const noexcept { return codes.size(); }
};

/// Reference tracker output. Either coordinates, an on-target flag, or both.
struct GroundTruthTrace {
  std::vector<double> timestamps;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<bool> on_target;

  [[nodiscard]] bool has_coordinates() const noexcept { return !x.empty(); }
  [[nodiscard]] bool has_on_target() const noexcept { return !on_target.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return timestamps.size(); }
};

/// Column names of a gaze CSV. Defaults follow OpenFace exports. An empty
/// `confidence` or `frame` name means the column is absent.
struct GazeCsvSchema {
  std::string timestamp = "timestamp";
  std::string confidence = "confidence";
  std::string gaze_x = "gaze_angle_x";
  std::string gaze_y = "gaze_angle_y";
  std::string frame;
};

struct LoadDiagnostics {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::vector<std::string> warnings;
};

/// Parses a header-bearing, comma-delimited gaze CSV. Rows with unparseable
/// or non-finite mapped values are dropped and counted. The result is sorted
/// by timestamp; when `nominal_fps` is not given it is inferred from the
/// median frame spacing.
GazeTrace load_gaze_csv(const std::filesystem::path& path, const GazeCsvSchema& schema = {},
                        std::optional<double> nominal_fps = std::nullopt,
                        LoadDiagnostics* diagnostics = nullptr);

/// Same as load_gaze_csv but from in-memory text.
GazeTrace parse_gaze_csv(const std::string& text, const GazeCsvSchema& schema = {},
                         std::optional<double> nominal_fps = std::nullopt,
                         LoadDiagnostics* diagnostics = nullptr);

void write_gaze_csv(const std::filesystem::path& path, const GazeTrace& trace,
                    const GazeCsvSchema& schema = {});
std::string format_gaze_csv(const GazeTrace& trace, const GazeCsvSchema& schema = {});

GroundTruthTrace load_ground_truth_csv(const std::filesystem::path& path);
GroundTruthTrace parse_ground_truth_csv(const std::string& text);
void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruthTrace& truth);

EncodedTrace load_encoded_csv(const std::filesystem::path& path);
EncodedTrace parse_encoded_csv(const std::string& text);
void write_encoded_csv(const std::filesystem::path& path, const EncodedTrace& codes);
std::string format_encoded_csv(const EncodedTrace& codes);

/// Returns a warning when the median frame spacing deviates from 1/nominal_fps
/// by more than 20%.
std::optional<std::string> check_frame_spacing(const GazeTrace& trace);

struct FilteredTrace {
  GazeTrace kept;
  MissingMask mask;  // indexed like the input trace
};

/// Keeps frames with confidence strictly greater than `threshold`.
FilteredTrace filter_confidence(const GazeTrace& trace, double threshold = 0.9);

/// Index of the non-overlapping window of width 1/fps that `timestamp` falls
/// in, counting from `origin`.
std::int64_t window_index(double timestamp, double origin, double fps);

/// Windowed mean of the gaze angles. Window timestamps are window starts;
/// empty windows are omitted. `origin` defaults to the first timestamp.
GazeTrace downsample_raw(const GazeTrace& trace, double target_fps,
                         std::optional<double> origin = std::nullopt);

/// Windowed majority vote over region codes, ignoring Missing. Ties go to the
/// smallest region; a window with only Missing codes yields Missing.
EncodedTrace downsample_encoded(const EncodedTrace& codes, double target_fps,
                                std::optional<double> origin = std::nullopt);

struct FlagSeries {
  std::vector<double> timestamps;
  std::vector<bool> values;
};

/// Windowed majority of a boolean series; a tie resolves to false.
FlagSeries downsample_flags(std::span<const double> timestamps, const std::vector<bool>& values,
                            double target_fps, std::optional<double> origin = std::nullopt);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace ice
