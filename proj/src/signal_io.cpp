#include "ice/signal_io.hpp"

#include "ice/csv.hpp"
#include "ice/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ice {

namespace {

void warn(LoadDiagnostics* diag, std::string message) {
  if (diag) diag->warnings.push_back(std::move(message));
}

double median_spacing(const std::vector<GazeFrame>& frames) {
  std::vector<double> dt;
  dt.reserve(frames.size());
  for (std::size_t i = 1; i < frames.size(); ++i) {
    dt.push_back(frames[i].timestamp - frames[i - 1].timestamp);
  }
  if (dt.empty()) return 0.0;
  const auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  if (dt.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(dt.begin(), mid);
  return 0.5 * (lower + upper);
}

void require_fps(double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(ErrorKind::InvalidArgument, "target fps must be positive");
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

GazeTrace parse_gaze_csv(const std::string& text, const GazeCsvSchema& schema,
                         std::optional<double> nominal_fps, LoadDiagnostics* diagnostics) {
  const detail::CsvTable table = detail::parse_csv(text);
  const std::size_t c_ts = table.require_column(schema.timestamp, "timestamp");
  const std::size_t c_x = table.require_column(schema.gaze_x, "gaze x");
  const std::size_t c_y = table.require_column(schema.gaze_y, "gaze y");
  std::optional<std::size_t> c_conf;
  if (!schema.confidence.empty()) c_conf = table.require_column(schema.confidence, "confidence");
  std::optional<std::size_t> c_frame;
  if (!schema.frame.empty()) c_frame = table.require_column(schema.frame, "frame");

  std::vector<GazeFrame> frames;
  frames.reserve(table.rows.size());
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto cell = [&](std::size_t c) -> std::optional<double> {
      if (c >= row.size()) return std::nullopt;
      auto v = detail::parse_double(row[c]);
      if (!v || !std::isfinite(*v)) return std::nullopt;
      return v;
    };
    const auto ts = cell(c_ts);
    const auto gx = cell(c_x);
    const auto gy = cell(c_y);
    std::optional<double> conf = 1.0;
    if (c_conf) conf = cell(*c_conf);
    if (!ts || !gx || !gy || !conf || *ts < 0.0 || *conf < 0.0 || *conf > 1.0) {
      ++dropped;
      continue;
    }
    GazeFrame f;
    f.index = r;
    if (c_frame) {
      const auto idx = c_frame && *c_frame < row.size() ? detail::parse_integer(row[*c_frame])
                                                        : std::nullopt;
      if (idx && *idx >= 0) f.index = static_cast<std::size_t>(*idx);
    }
    f.timestamp = *ts;
    f.gaze_x = *gx;
    f.gaze_y = *gy;
    f.confidence = *conf;
    frames.push_back(f);
  }
  if (diagnostics) {
    diagnostics->rows_read = table.rows.size();
    diagnostics->rows_dropped = dropped;
  }
  if (dropped > 0) {
    warn(diagnostics, "dropped " + std::to_string(dropped) + " row(s) with unparseable values");
  }

  std::stable_sort(frames.begin(), frames.end(),
                   [](const GazeFrame& a, const GazeFrame& b) { return a.timestamp < b.timestamp; });
  const auto dup = std::unique(frames.begin(), frames.end(), [](const GazeFrame& a, const GazeFrame& b) {
    return a.timestamp == b.timestamp;
  });
  if (dup != frames.end()) {
    const auto n = static_cast<std::size_t>(frames.end() - dup);
    frames.erase(dup, frames.end());
    if (diagnostics) diagnostics->rows_dropped += n;
    warn(diagnostics, "dropped " + std::to_string(n) + " row(s) with duplicate timestamps");
  }
  if (frames.empty()) throw Error(ErrorKind::EmptyTrace, "no usable gaze rows");

  GazeTrace trace;
  trace.frames = std::move(frames);
  if (nominal_fps) {
    require_fps(*nominal_fps);
    trace.nominal_fps = *nominal_fps;
  } else if (const double dt = median_spacing(trace.frames); dt > 0.0) {
    trace.nominal_fps = 1.0 / dt;
  }
  if (auto w = check_frame_spacing(trace)) warn(diagnostics, *w);
  return trace;
}

GazeTrace load_gaze_csv(const std::filesystem::path& path, const GazeCsvSchema& schema,
                        std::optional<double> nominal_fps, LoadDiagnostics* diagnostics) {
  return parse_gaze_csv(detail::read_text_file(path), schema, nominal_fps, diagnostics);
}

std::string format_gaze_csv(const GazeTrace& trace, const GazeCsvSchema& schema) {
  const std::string frame_col = schema.frame.empty() ? "frame" : schema.frame;
  const std::string conf_col = schema.confidence.empty() ? "confidence" : schema.confidence;
  std::ostringstream out;
  out << frame_col << ',' << schema.timestamp << ',' << conf_col << ',' << schema.gaze_x << ','
      << schema.gaze_y << '\n';
  for (const auto& f : trace.frames) {
    out << f.index << ',' << format_double(f.timestamp) << ',' << format_double(f.confidence)
        << ',' << format_double(f.gaze_x) << ',' << format_double(f.gaze_y) << '\n';
  }
  return out.str();
}

void write_gaze_csv(const std::filesystem::path& path, const GazeTrace& trace,
                    const GazeCsvSchema& schema) {
  detail::write_text_file(path, format_gaze_csv(trace, schema));
}

GroundTruthTrace parse_ground_truth_csv(const std::string& text) {
  const detail::CsvTable table = detail::parse_csv(text);
  const std::size_t c_ts = table.require_column("timestamp", "timestamp");
  const auto c_x = table.column("x");
  const auto c_y = table.column("y");
  const auto c_on = table.column("on_target");
  const bool coords = c_x && c_y;
  if (!coords && !c_on) {
    throw Error(ErrorKind::MissingColumn, "ground truth needs 'x,y' or 'on_target' columns");
  }

  struct Row {
    double t, x, y;
    bool on;
  };
  std::vector<Row> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto num = [&](std::size_t c) -> std::optional<double> {
      if (c >= row.size()) return std::nullopt;
      auto v = detail::parse_double(row[c]);
      if (!v || !std::isfinite(*v)) return std::nullopt;
      return v;
    };
    const auto t = num(c_ts);
    if (!t) continue;
    Row r{*t, 0.0, 0.0, false};
    if (coords) {
      const auto x = num(*c_x);
      const auto y = num(*c_y);
      if (!x || !y) continue;
      r.x = *x;
      r.y = *y;
    }
    if (c_on) {
      const auto v = num(*c_on);
      if (!v || (*v != 0.0 && *v != 1.0)) continue;
      r.on = *v == 1.0;
    }
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
  rows.erase(std::unique(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t == b.t; }),
             rows.end());
  if (rows.empty()) throw Error(ErrorKind::EmptyTrace, "no usable ground-truth rows");

  GroundTruthTrace out;
  for (const auto& r : rows) {
    out.timestamps.push_back(r.t);
    if (coords) {
      out.x.push_back(r.x);
      out.y.push_back(r.y);
    }
    if (c_on) out.on_target.push_back(r.on);
  }
  return out;
}

GroundTruthTrace load_ground_truth_csv(const std::filesystem::path& path) {
  return parse_ground_truth_csv(detail::read_text_file(path));
}

void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruthTrace& truth) {
  std::ostringstream out;
  out << "timestamp";
  if (truth.has_coordinates()) out << ",x,y";
  if (truth.has_on_target()) out << ",on_target";
  out << '\n';
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out << format_double(truth.timestamps[i]);
    if (truth.has_coordinates()) out << ',' << format_double(truth.x[i]) << ',' << format_double(truth.y[i]);
    if (truth.has_on_target()) out << ',' << (truth.on_target[i] ? 1 : 0);
    out << '\n';
  }
  detail::write_text_file(path, out.str());
}

EncodedTrace parse_encoded_csv(const std::string& text) {
  const detail::CsvTable table = detail::parse_csv(text);
  const std::size_t c_ts = table.require_column("timestamp", "timestamp");
  const std::size_t c_region = table.require_column("region", "region");
  EncodedTrace out;
  for (const auto& row : table.rows) {
    if (c_ts >= row.size() || c_region >= row.size()) {
      throw Error(ErrorKind::InvalidArgument, "short row in encoded CSV");
    }
    const auto t = detail::parse_double(row[c_ts]);
    if (!t) throw Error(ErrorKind::InvalidArgument, "bad timestamp '" + row[c_ts] + "'");
    RegionCode code = kMissingRegion;
    if (row[c_region] != "NA") {
      const auto r = detail::parse_integer(row[c_region]);
      if (!r || *r < 1 || *r > 9) {
        throw Error(ErrorKind::InvalidArgument, "bad region '" + row[c_region] + "'");
      }
      code = static_cast<RegionCode>(*r);
    }
    out.timestamps.push_back(*t);
    out.codes.push_back(code);
  }
  return out;
}

EncodedTrace load_encoded_csv(const std::filesystem::path& path) {
  return parse_encoded_csv(detail::read_text_file(path));
}

std::string format_encoded_csv(const EncodedTrace& codes) {
  std::ostringstream out;
  out << "timestamp,region\n";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << format_double(codes.timestamps[i]) << ',';
    if (codes.codes[i] == kMissingRegion) {
      out << "NA";
    } else {
      out << static_cast<int>(codes.codes[i]);
    }
    out << '\n';
  }
  return out.str();
}

void write_encoded_csv(const std::filesystem::path& path, const EncodedTrace& codes) {
  detail::write_text_file(path, format_encoded_csv(codes));
}

std::optional<std::string> check_frame_spacing(const GazeTrace& trace) {
  if (trace.size() < 2 || !(trace.nominal_fps > 0.0)) return std::nullopt;
  const double expected = 1.0 / trace.nominal_fps;
  const double actual = median_spacing(trace.frames);
  if (std::abs(actual - expected) > 0.2 * expected) {
    std::ostringstream ss;
    ss << "median frame spacing " << actual << " s deviates more than 20% from nominal "
       << expected << " s";
    return ss.str();
  }
  return std::nullopt;
}

FilteredTrace filter_confidence(const GazeTrace& trace, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "confidence threshold must lie in [0,1]");
  }
  FilteredTrace out;
  out.kept.nominal_fps = trace.nominal_fps;
  out.mask.assign(trace.size(), false);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.frames[i].confidence > threshold) {
      out.kept.frames.push_back(trace.frames[i]);
    } else {
      out.mask[i] = true;
    }
  }
  if (out.kept.empty()) {
    throw Error(ErrorKind::EmptyTrace, "every frame is at or below the confidence threshold");
  }
  return out;
}

std::int64_t window_index(double timestamp, double origin, double fps) {
  // The small offset keeps timestamps that sit exactly on a window edge from
  // falling into the previous window through rounding.
  return static_cast<std::int64_t>(std::floor((timestamp - origin) * fps + 1e-9));
}

GazeTrace downsample_raw(const GazeTrace& trace, double target_fps, std::optional<double> origin) {
  require_fps(target_fps);
  if (target_fps > trace.nominal_fps * (1.0 + 1e-9)) {
    throw Error(ErrorKind::InvalidArgument, "target fps exceeds the trace's nominal fps");
  }
  GazeTrace out;
  out.nominal_fps = target_fps;
  if (trace.empty()) return out;
  const double t0 = origin.value_or(trace.frames.front().timestamp);

  std::size_t i = 0;
  while (i < trace.size()) {
    const std::int64_t w = window_index(trace.frames[i].timestamp, t0, target_fps);
    double sx = 0.0, sy = 0.0, sc = 0.0;
    std::size_t n = 0;
    while (i < trace.size() && window_index(trace.frames[i].timestamp, t0, target_fps) == w) {
      sx += trace.frames[i].gaze_x;
      sy += trace.frames[i].gaze_y;
      sc += trace.frames[i].confidence;
      ++n;
      ++i;
    }
    GazeFrame f;
    f.index = static_cast<std::size_t>(std::max<std::int64_t>(w, 0));
    f.timestamp = t0 + static_cast<double>(w) / target_fps;
    f.gaze_x = sx / static_cast<double>(n);
    f.gaze_y = sy / static_cast<double>(n);
    f.confidence = sc / static_cast<double>(n);
    out.frames.push_back(f);
  }
  return out;
}

EncodedTrace downsample_encoded(const EncodedTrace& codes, double target_fps,
                                std::optional<double> origin) {
  require_fps(target_fps);
  if (codes.timestamps.size() != codes.codes.size()) {
    throw Error(ErrorKind::LengthMismatch, "encoded trace timestamps and codes differ in length");
  }
  EncodedTrace out;
  if (codes.size() == 0) return out;
  const double t0 = origin.value_or(codes.timestamps.front());

  std::size_t i = 0;
  while (i < codes.size()) {
    const std::int64_t w = window_index(codes.timestamps[i], t0, target_fps);
    std::array<std::size_t, 10> counts{};
    while (i < codes.size() && window_index(codes.timestamps[i], t0, target_fps) == w) {
      ++counts[codes.codes[i]];
      ++i;
    }
    RegionCode best = kMissingRegion;
    std::size_t best_count = 0;
    for (RegionCode r = 1; r <= 9; ++r) {
      if (counts[r] > best_count) {
        best = r;
        best_count = counts[r];
      }
    }
    out.timestamps.push_back(t0 + static_cast<double>(w) / target_fps);
    out.codes.push_back(best);
  }
  return out;
}

FlagSeries downsample_flags(std::span<const double> timestamps, const std::vector<bool>& values,
                            double target_fps, std::optional<double> origin) {
  require_fps(target_fps);
  if (timestamps.size() != values.size()) {
    throw Error(ErrorKind::LengthMismatch, "flag timestamps and values differ in length");
  }
  FlagSeries out;
  if (timestamps.empty()) return out;
  const double t0 = origin.value_or(timestamps.front());
  std::size_t i = 0;
  while (i < timestamps.size()) {
    const std::int64_t w = window_index(timestamps[i], t0, target_fps);
    std::size_t on = 0, total = 0;
    while (i < timestamps.size() && window_index(timestamps[i], t0, target_fps) == w) {
      on += values[i] ? 1 : 0;
      ++total;
      ++i;
    }
    out.timestamps.push_back(t0 + static_cast<double>(w) / target_fps);
    out.values.push_back(2 * on > total);
  }
  return out;
}

}  // namespace ice
