// ice: command-line front end for the gaze encoding pipeline.
//
// Exit codes: 0 success, 1 unreadable or malformed input, 2 the pipeline
// could not produce a result (clustering FAIL, degenerate signal or sample),
// 3 bad flags. Failures print one JSON object on stdout.

#include "run_record.hpp"

#include "ice/csv.hpp"
#include "ice/errors.hpp"
#include "ice/evaluation.hpp"
#include "ice/ice_core.hpp"
#include "ice/pipeline.hpp"
#include "ice/serialization.hpp"
#include "ice/signal_io.hpp"
#include "ice/stat_models.hpp"
#include "ice/sync_align.hpp"
#include "ice/synth_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ice::cli {
namespace {

// ---------------------------------------------------------------------------
// Shared option groups

struct GazeInputOptions {
  GazeCsvSchema schema;
  double confidence_threshold = 0.9;
  double input_fps = 0.0;  // 0: infer from the timestamps

  void add_to(CLI::App& cmd) {
    cmd.add_option("--timestamp-col", schema.timestamp, "Timestamp column (seconds)")->capture_default_str();
    cmd.add_option("--confidence-col", schema.confidence, "Confidence column; empty if absent")
        ->capture_default_str();
    cmd.add_option("--x-col", schema.gaze_x, "Horizontal gaze angle column (radians)")->capture_default_str();
    cmd.add_option("--y-col", schema.gaze_y, "Vertical gaze angle column (radians)")->capture_default_str();
    cmd.add_option("--confidence-threshold", confidence_threshold, "Keep frames with confidence above this")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--input-fps", input_fps, "Nominal frame rate of the input; 0 infers it")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }

  [[nodiscard]] std::optional<double> nominal() const {
    return input_fps > 0.0 ? std::optional<double>(input_fps) : std::nullopt;
  }

  [[nodiscard]] json to_json() const {
    return {{"timestamp_col", schema.timestamp},
            {"confidence_col", schema.confidence},
            {"x_col", schema.gaze_x},
            {"y_col", schema.gaze_y},
            {"confidence_threshold", confidence_threshold},
            {"input_fps", input_fps}};
  }
};

struct IceOptions {
  IceConfig config;
  bool y_up = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--epsilon-start", config.epsilon_start, "Largest DBSCAN radius tried")->capture_default_str();
    cmd.add_option("--epsilon-step", config.epsilon_step, "Radius decrement")->capture_default_str();
    cmd.add_option("--epsilon-fallback", config.epsilon_floor_fallback, "Radius of the final retry")
        ->capture_default_str();
    cmd.add_option("--dominance-ratio", config.dominance_ratio, "Largest/second-largest label size limit")
        ->capture_default_str();
    cmd.add_option("--min-pts-fraction", config.min_pts_fraction, "minPts as a fraction of frames")
        ->capture_default_str();
    cmd.add_flag("--y-up", y_up, "Positive gaze_y points up rather than down");
  }

  [[nodiscard]] IceConfig resolved() const {
    IceConfig c = config;
    c.axis_convention = y_up ? AxisConvention::YUp : AxisConvention::YDown;
    return c;
  }
};

void print_record(const json& record) { std::cout << record.dump() << '\n'; }

// Runs a command body, turning every failure into its exit code, an error
// record on stdout and a manifest entry. The manifest is written on all paths.
template <class F>
int guarded(RunRecord& rec, F&& body) {
  int code = kOk;
  try {
    code = body();
  } catch (const CommandError& e) {
    code = e.exit_code();
    const json record = error_record(e.kind(), e.what(), code);
    print_record(record);
    rec.note_error(record);
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    const json record = error_record(std::string(to_string(e.kind())), e.what(), code);
    print_record(record);
    rec.note_error(record);
  } catch (const std::exception& e) {
    code = kFailure;
    const json record = error_record("Internal", e.what(), code);
    print_record(record);
    rec.note_error(record);
  }
  rec.finish(code);
  return code;
}

std::string stem_of(const fs::path& p) {
  std::string s = p.filename().string();
  for (const char* ext : {".csv", ".CSV", ".txt"}) {
    const std::string e(ext);
    if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) {
      return s.substr(0, s.size() - e.size());
    }
  }
  return s;
}

GazeTrace read_gaze(RunRecord& rec, const fs::path& path, const GazeInputOptions& opt) {
  const std::string text = rec.read_input(path);
  LoadDiagnostics diag;
  GazeTrace trace = parse_input(path, [&] { return parse_gaze_csv(text, opt.schema, opt.nominal(), &diag); });
  if (diag.rows_dropped > 0) {
    std::cerr << path.string() << ": dropped " << diag.rows_dropped << " of " << diag.rows_read << " rows\n";
  }
  for (const auto& w : diag.warnings) std::cerr << path.string() << ": " << w << '\n';
  return trace;
}

// Tracker coordinates as a gaze trace so they can share the resampling path.
GazeTrace trace_from_truth(const GroundTruthTrace& truth) {
  GazeTrace t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    t.frames.push_back({i, truth.timestamps[i], truth.x[i], truth.y[i], 1.0});
  }
  std::vector<double> gaps;
  for (std::size_t i = 1; i < t.frames.size(); ++i) gaps.push_back(t.frames[i].timestamp - t.frames[i - 1].timestamp);
  if (gaps.empty()) throw Error(ErrorKind::EmptyTrace, "ground truth needs at least two rows");
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
  t.nominal_fps = 1.0 / gaps[gaps.size() / 2];
  return t;
}

std::string histogram_csv(const RegionHistogram& h) {
  std::ostringstream out;
  out << "region,count,frequency\n";
  for (int r = 1; r <= 9; ++r) {
    out << r << ',' << h.counts[static_cast<std::size_t>(r - 1)] << ',' << format_double(h[r]) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// encode

struct EncodeCommand {
  std::vector<fs::path> inputs;
  fs::path out = ".";
  GazeInputOptions gaze;
  IceOptions ice;
  double fps = 3.0;
  double prefix_seconds = 0.0;
  unsigned jobs = 1;

  int encode_one(RunRecord& rec, const fs::path& input, const PipelineOptions& po) const {
    const GazeTrace trace = read_gaze(rec, input, gaze);
    const EncodeOutcome enc = encode_recording(trace, po);
    if (!enc.encoder) {
      const json record = error_record("Fail", std::string(kFailReason), kFailure, input.string());
      print_record(record);
      rec.note_error(record);
      return kFailure;
    }
    const RegionHistogram hist = region_histogram(enc.downsampled);
    const std::string stem = stem_of(input);
    rec.write_output(stem + ".encoded.csv", format_encoded_csv(enc.downsampled));
    rec.write_json(stem + ".encoder.json", *enc.encoder);
    rec.write_output(stem + ".histogram.csv", histogram_csv(hist));
    return kOk;
  }

  int run() {
    RunRecord rec("encode", out);
    return guarded(rec, [&]() -> int {
      PipelineOptions po;
      po.confidence_threshold = gaze.confidence_threshold;
      po.fps = fps;
      po.ice = ice.resolved();
      if (prefix_seconds > 0.0) po.prefix_seconds = prefix_seconds;
      rec.set_config({{"gaze", gaze.to_json()},
                      {"ice", po.ice},
                      {"fps", fps},
                      {"prefix_seconds", prefix_seconds},
                      {"jobs", jobs}});

      std::set<std::string> stems;
      for (const auto& in : inputs) {
        if (!stems.insert(stem_of(in)).second) {
          throw CommandError(kBadFlags, "InvalidArgument", "two inputs share the file name " + in.filename().string());
        }
      }
      po.ice.validate();

      std::vector<int> codes(inputs.size(), kOk);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
          try {
            codes[i] = encode_one(rec, inputs[i], po);
          } catch (const CommandError& e) {
            const json record = error_record(e.kind(), e.what(), e.exit_code(), inputs[i].string());
            print_record(record);
            rec.note_error(record);
            codes[i] = e.exit_code();
          } catch (const Error& e) {
            const json record =
                error_record(std::string(to_string(e.kind())), e.what(), exit_code_for(e.kind()), inputs[i].string());
            print_record(record);
            rec.note_error(record);
            codes[i] = exit_code_for(e.kind());
          }
        }
      };
      const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();

      int code = kOk;
      for (int c : codes) {
        if (c != kOk) {
          code = c;
          break;
        }
      }
      return code;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("encode", "Encode gaze recordings into 3x3 region codes");
    cmd->add_option("-i,--input", inputs, "Gaze CSV file(s)")->required();
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--fps", fps, "Calibration and output frame rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--prefix-seconds", prefix_seconds, "Calibrate on this initial span only; 0 uses everything")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("-j,--jobs", jobs, "Files encoded in parallel")->capture_default_str()->check(CLI::Range(1u, 256u));
    gaze.add_to(*cmd);
    ice.add_to(*cmd);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

// ---------------------------------------------------------------------------
// sync

struct SyncCommand {
  fs::path gaze_path;
  fs::path truth_path;
  fs::path out = ".";
  GazeInputOptions gaze;
  SyncOptions sync;
  std::string axis = "auto";

  int run() {
    RunRecord rec("sync", out);
    return guarded(rec, [&]() -> int {
      rec.set_config({{"gaze", gaze.to_json()},
                      {"fps", sync.fps},
                      {"max_lag_seconds", sync.max_lag_seconds},
                      {"symmetric", sync.symmetric},
                      {"min_overlap", sync.min_overlap},
                      {"axis", axis}});
      const GazeTrace trace = read_gaze(rec, gaze_path, gaze);
      const std::string truth_text = rec.read_input(truth_path);
      const GroundTruthTrace truth = parse_input(truth_path, [&] {
        GroundTruthTrace t = parse_ground_truth_csv(truth_text);
        if (!t.has_coordinates()) throw Error(ErrorKind::MissingColumn, "sync needs x,y ground-truth columns");
        return t;
    });

    const FilteredTrace filtered = filter_confidence(trace, gaze.confidence_threshold);
    const Axis chosen = axis == "x"   ? Axis::X
                        : axis == "y" ? Axis::Y
                                      : select_sync_dimension(filtered.kept);
    const GazeTrace video = downsample_raw(filtered.kept, sync.fps, 0.0);
    const GazeTrace tracker = downsample_raw(trace_from_truth(truth), sync.fps, 0.0);
    const std::vector<double> a = dense_signal(video, chosen, sync.fps);
    const std::vector<double> b = dense_signal(tracker, chosen, sync.fps);
    const SyncResult result = synchronize(a, b, sync);

    json summary = result;
    summary["axis"] = chosen == Axis::X ? "x" : "y";
    rec.write_json("sync.json", summary);
    std::ostringstream curve;
    curve << "lag_seconds,correlation\n";
    for (const auto& p : result.curve) curve << format_double(p.lag_seconds) << ',' << format_double(p.correlation) << '\n';
    rec.write_output("sync_curve.csv", curve.str());
    return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("sync", "Find the lag between a gaze recording and tracker ground truth");
    cmd->add_option("--gaze", gaze_path, "Gaze CSV")->required();
    cmd->add_option("--truth", truth_path, "Ground-truth CSV with timestamp,x,y")->required();
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--fps", sync.fps, "Common resampling rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--max-lag", sync.max_lag_seconds, "Largest lag searched, seconds")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--symmetric", sync.symmetric, "Search negative lags too");
    cmd->add_option("--min-overlap", sync.min_overlap, "Fewest overlapping samples per lag")->capture_default_str();
    cmd->add_option("--axis", axis, "Gaze axis compared")->capture_default_str()->check(CLI::IsMember({"auto", "x", "y"}));
    gaze.add_to(*cmd);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

// ---------------------------------------------------------------------------
// eval

struct EvalCommand {
  fs::path encoded_path;
  fs::path truth_path;
  fs::path sync_path;
  fs::path out = ".";
  std::vector<double> face_box;
  double fps = 3.0;
  double lag_seconds = 0.0;

  int run() {
    RunRecord rec("eval", out);
    return guarded(rec, [&]() -> int {
      const EncodedTrace pred = parse_input(encoded_path, [&] { return parse_encoded_csv(rec.read_input(encoded_path)); });
      const GroundTruthTrace truth =
          parse_input(truth_path, [&] { return parse_ground_truth_csv(rec.read_input(truth_path)); });
      double lag = lag_seconds;
      if (!sync_path.empty()) {
        lag = parse_input(sync_path, [&] {
          try {
            return json::parse(rec.read_input(sync_path)).get<SyncResult>().lag_seconds;
          } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidArgument, std::string("bad sync JSON: ") + e.what());
          }
        });
      }
      rec.set_config({{"fps", fps}, {"lag_seconds", lag}, {"face_box", face_box}});

      std::vector<bool> on_target;
      if (!face_box.empty()) {
        const RveBox box{face_box[0], face_box[1], face_box[2], face_box[3]};
        on_target = parse_input(truth_path, [&] { return on_target_from_box(truth, box); });
      } else if (truth.has_on_target()) {
        on_target = truth.on_target;
      } else {
        throw CommandError(kBadFlags, "InvalidArgument", "ground truth has no on_target column; pass --face-box");
      }

      const AlignedEvaluation aligned = align_for_evaluation(pred, truth.timestamps, on_target, lag, fps);
      const ConfusionCounts counts = confusion(aligned.pred, aligned.truth);
      json report = metrics(counts);
      report["counts"] = counts;
      report["lag_seconds"] = lag;
      rec.write_json("eval.json", report);
      return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("eval", "Score encoded regions against tracker ground truth");
    cmd->add_option("--encoded", encoded_path, "Encoded CSV from encode")->required();
    cmd->add_option("--truth", truth_path, "Ground-truth CSV")->required();
    auto* sync_opt = cmd->add_option("--sync", sync_path, "Sync JSON giving the lag");
    cmd->add_option("--lag", lag_seconds, "Lag in seconds when no sync JSON is given")->excludes(sync_opt);
    cmd->add_option("--face-box", face_box, "x_min x_max y_min y_max of the face in tracker coordinates")
        ->expected(4);
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--fps", fps, "Evaluation frame rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

// ---------------------------------------------------------------------------
// stats

struct StatsCommand {
  fs::path input;
  fs::path out = ".";
  std::string group_col = "group";
  std::string group_a;
  std::string group_b;
  TTestOptions test;
  std::size_t comparisons = 0;  // 0: one per tested column

  int run() {
    RunRecord rec("stats", out);
    return guarded(rec, [&]() -> int {
      const std::string text = rec.read_input(input);
      struct Columns {
        std::vector<std::string> names;
        std::map<std::string, std::vector<std::vector<double>>> by_group;  // group -> column -> values
      };
      const Columns cols = parse_input(input, [&] {
        const detail::CsvTable table = detail::parse_csv(text);
        const std::size_t g = table.require_column(group_col, "group");
        Columns c;
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < table.header.size(); ++k) {
          if (k == g) continue;
          idx.push_back(k);
          c.names.push_back(table.header[k]);
        }
        if (idx.empty()) throw Error(ErrorKind::MissingColumn, "no value columns next to the group column");
        for (const auto& row : table.rows) {
          if (row.size() != table.header.size()) throw Error(ErrorKind::InvalidArgument, "ragged row");
          auto& slot = c.by_group[row[g]];
          slot.resize(idx.size());
          for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto v = detail::parse_double(row[idx[k]]);
            if (!v || !std::isfinite(*v)) throw Error(ErrorKind::InvalidArgument, "bad value '" + row[idx[k]] + "'");
            slot[k].push_back(*v);
          }
        }
        return c;
      });

      std::string a = group_a;
      std::string b = group_b;
      if (a.empty() || b.empty()) {
        if (cols.by_group.size() != 2) {
          throw CommandError(kFailure, "DegenerateInput",
                             "expected exactly two groups, found " + std::to_string(cols.by_group.size()));
        }
        a = cols.by_group.begin()->first;
        b = std::next(cols.by_group.begin())->first;
      }
      for (const auto& name : {a, b}) {
        if (!cols.by_group.count(name)) throw CommandError(kBadFlags, "InvalidArgument", "no rows for group " + name);
      }

      TTestOptions opt = test;
      opt.num_comparisons = comparisons > 0 ? comparisons : cols.names.size();
      rec.set_config({{"group_col", group_col},
                      {"group_a", a},
                      {"group_b", b},
                      {"alpha", opt.alpha},
                      {"num_comparisons", opt.num_comparisons},
                      {"welch", opt.welch}});

      std::ostringstream csv;
      csv << "column,n_a,mean_a,sd_a,n_b,mean_b,sd_b,t,df,p,cohens_d,bonferroni_threshold,significant\n";
      json rows = json::array();
      for (std::size_t k = 0; k < cols.names.size(); ++k) {
        const TTestResult r = t_test_cohens_d(cols.by_group.at(a)[k], cols.by_group.at(b)[k], opt);
        csv << cols.names[k] << ',' << r.n_a << ',' << format_double(r.mean_a) << ',' << format_double(r.sd_a) << ','
            << r.n_b << ',' << format_double(r.mean_b) << ',' << format_double(r.sd_b) << ','
            << format_double(r.t_stat) << ',' << format_double(r.df) << ',' << format_double(r.p_two_tailed) << ','
            << format_double(r.cohens_d) << ',' << format_double(r.bonferroni_threshold) << ','
            << (r.significant_bonferroni ? "true" : "false") << '\n';
        json j = r;
        j["column"] = cols.names[k];
        rows.push_back(j);
      }
      rec.write_output("stats.csv", csv.str());
      rec.write_json("stats.json", {{"group_a", a}, {"group_b", b}, {"tests", rows}});
      return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("stats", "Per-column two-sample t-tests with Cohen's d");
    cmd->add_option("-i,--input", input, "CSV with a group column and numeric columns")
        ->required();
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--group-col", group_col, "Name of the group column")->capture_default_str();
    cmd->add_option("--group-a", group_a, "First group; default the smaller label");
    cmd->add_option("--group-b", group_b, "Second group; default the larger label");
    cmd->add_option("--alpha", test.alpha, "Family-wise significance level")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--comparisons", comparisons, "Bonferroni divisor; 0 counts the tested columns")
        ->capture_default_str();
    cmd->add_flag("--welch", test.welch, "Unequal-variance t-test");
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

// ---------------------------------------------------------------------------
// fit

struct FitCommand {
  fs::path input;
  fs::path out = ".";
  std::string task = "logit";
  std::string reg = "l1";
  std::size_t folds = 5;
  std::size_t split = 0;
  std::uint64_t seed = 0;
  double lambda_min = 1e-4;
  double lambda_max = 10.0;
  std::size_t lambda_count = 20;
  SolverOptions solver;

  int run() {
    RunRecord rec("fit", out);
    return guarded(rec, [&]() -> int {
      const GroupedDataset data = parse_input(input, [&] { return parse_feature_csv(rec.read_input(input)); });
      const std::vector<double> grid = log_spaced(lambda_min, lambda_max, lambda_count);
      rec.set_config({{"task", task},
                      {"regularization", reg},
                      {"folds", folds},
                      {"split", split},
                      {"seed", seed},
                      {"lambda_grid", grid},
                      {"max_iterations", solver.max_iterations},
                      {"tolerance", solver.tolerance}});

      if (task == "logit") {
        const auto splits = group_k_fold(data, folds, seed);
        if (split >= splits.size()) throw CommandError(kBadFlags, "InvalidArgument", "--split must be below --folds");
        const Regularization r = reg == "l2" ? Regularization::L2 : Regularization::L1;
        const LogisticReport report = fit_logistic(data, r, grid, splits[split], solver);
        rec.write_json("logit_model.json", {{"task", "logit"},
                                            {"model", report.model},
                                            {"dev_cross_entropy", report.dev_cross_entropy},
                                            {"test_accuracy", report.test_accuracy},
                                            {"test_log_loss", report.test_log_loss}});
        std::ostringstream csv;
        csv << "lambda,dev_cross_entropy\n";
        for (std::size_t k = 0; k < report.lambda_grid.size(); ++k) {
          csv << format_double(report.lambda_grid[k]) << ',' << format_double(report.dev_curve[k]) << '\n';
        }
        rec.write_output("logit_report.csv", csv.str());
      } else {
        const LassoReport report = fit_lasso(data, grid, folds, seed, solver);
        rec.write_json("lasso_model.json", {{"task", "lasso"},
                                            {"model", report.model},
                                            {"test_mse", report.test_mse},
                                            {"fold_test_mse", report.fold_test_mse},
                                            {"fold_lambda", report.fold_lambda}});
        std::ostringstream csv;
        csv << "feature,beta\n";
        for (const auto& w : report.weight_report) csv << w.feature << ',' << format_double(w.beta) << '\n';
        rec.write_output("lasso_weights.csv", csv.str());
      }
      return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("fit", "Fit a regularized logistic or LASSO model on grouped features");
    cmd->add_option("-i,--input", input, "CSV with group_id,label,features...")->required();
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--task", task, "Model family")->capture_default_str()->check(CLI::IsMember({"logit", "lasso"}));
    cmd->add_option("--reg", reg, "Logistic penalty")->capture_default_str()->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--folds", folds, "Group folds")->capture_default_str()->check(CLI::Range(3u, 1000u));
    cmd->add_option("--split", split, "Which fold split the logistic fit uses")->capture_default_str();
    cmd->add_option("--seed", seed, "Fold shuffling seed")->capture_default_str()->envname("ICE_SEED");
    cmd->add_option("--lambda-min", lambda_min, "Smallest penalty")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-max", lambda_max, "Largest penalty")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-count", lambda_count, "Log-spaced grid size")->capture_default_str()->check(CLI::Range(1u, 1000u));
    cmd->add_option("--max-iter", solver.max_iterations, "Solver iteration cap")->capture_default_str();
    cmd->add_option("--tol", solver.tolerance, "Solver tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

// ---------------------------------------------------------------------------
// sweep and simulate share scenario loading

struct ScenarioOptions {
  fs::path spec_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--spec", spec_path, "Scenario JSON; missing keys keep their defaults");
    seed_opt = cmd.add_option("--seed", seed, "RNG seed; overrides the spec")->envname("ICE_SEED");
  }

  ScenarioSpec load(RunRecord& rec) const {
    ScenarioSpec spec;
    if (!spec_path.empty()) {
      spec = parse_input(spec_path, [&] {
        try {
          return json::parse(rec.read_input(spec_path)).get<ScenarioSpec>();
        } catch (const json::exception& e) {
          throw Error(ErrorKind::InvalidSpec, std::string("bad scenario JSON: ") + e.what());
        }
      });
    }
    if (seed_opt && seed_opt->count() > 0) spec.rng_seed = seed;
    return spec;
  }
};

struct SweepCommand {
  std::string kind = "fps";
  std::vector<double> values;
  fs::path out = ".";
  ScenarioOptions scenario;
  IceOptions ice;
  double confidence_threshold = 0.9;
  double fps = 3.0;
  double prefix_seconds = 0.0;

  int run() {
    RunRecord rec("sweep", out);
    return guarded(rec, [&]() -> int {
      const ScenarioSpec spec = scenario.load(rec);
      if (values.empty()) {
        values = kind == "fps" ? std::vector<double>{1, 2, 3, 5, 7.5, 15}
                               : std::vector<double>{30, 60, 120, 180, 240, 300, 420, 600};
      }
      PipelineOptions base;
      base.confidence_threshold = confidence_threshold;
      base.fps = fps;
      base.ice = ice.resolved();
      if (prefix_seconds > 0.0) base.prefix_seconds = prefix_seconds;
      rec.set_config({{"kind", kind},
                      {"values", values},
                      {"spec", spec},
                      {"ice", base.ice},
                      {"confidence_threshold", confidence_threshold},
                      {"fps", fps},
                      {"prefix_seconds", prefix_seconds}});
      spec.validate();
      base.ice.validate();

      const LabeledTrace labeled = generate(spec);
      std::ostringstream csv;
      csv << "parameter,accuracy,f1\n";
      for (double v : values) {
        PipelineOptions po = base;
        if (kind == "fps") po.fps = v;
        else po.prefix_seconds = v;
        const auto report = evaluate_scenario(labeled, spec, po);
        csv << format_double(v) << ',';
        if (report) csv << format_double(report->accuracy) << ',' << format_double(report->f1) << '\n';
        else csv << "NA,NA\n";
      }
      rec.write_output("sweep_" + kind + ".csv", csv.str());
      return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("sweep", "Accuracy and F1 on a synthetic scenario across frame rates or prefixes");
    cmd->add_option("--kind", kind, "Swept parameter")->capture_default_str()->check(CLI::IsMember({"fps", "prefix"}));
    cmd->add_option("--values", values, "Parameter values (fps, or prefix seconds)")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--confidence-threshold", confidence_threshold, "Keep frames with confidence above this")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--fps", fps, "Frame rate for prefix sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--prefix-seconds", prefix_seconds, "Calibration prefix for fps sweeps; 0 uses everything")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    scenario.add_to(*cmd);
    ice.add_to(*cmd);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

struct SimulateCommand {
  fs::path out = ".";
  ScenarioOptions scenario;
  double duration = 0.0;
  double fps = 0.0;
  double lag = 0.0;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* fps_opt = nullptr;
  CLI::Option* lag_opt = nullptr;

  int run() {
    RunRecord rec("simulate", out);
    return guarded(rec, [&]() -> int {
      ScenarioSpec spec = scenario.load(rec);
      if (duration_opt->count() > 0) spec.duration_seconds = duration;
      if (fps_opt->count() > 0) spec.fps = fps;
      if (lag_opt->count() > 0) spec.planted_lag_seconds = lag;
      rec.set_config({{"spec", spec}});
      const LabeledTrace labeled = generate(spec);

      rec.write_output("gaze.csv", format_gaze_csv(labeled.trace));
      std::ostringstream truth;
      truth << "timestamp,x,y,on_target\n";
      const GroundTruthTrace& tr = labeled.tracker;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        truth << format_double(tr.timestamps[i]) << ',' << format_double(tr.x[i]) << ',' << format_double(tr.y[i]) << ','
              << (tr.on_target[i] ? 1 : 0) << '\n';
      }
      rec.write_output("truth.csv", truth.str());
      std::ostringstream labels;
      labels << "frame,timestamp,component,region\n";
      for (std::size_t i = 0; i < labeled.trace.size(); ++i) {
        labels << i << ',' << format_double(labeled.trace.frames[i].timestamp) << ',' << labeled.truth_component[i] << ','
               << static_cast<int>(labeled.truth_region[i]) << '\n';
      }
      rec.write_output("labels.csv", labels.str());
      rec.write_json("spec.json", spec);
      return kOk;
    });
  }

  void attach(CLI::App& app, std::function<int()>& action) {
    CLI::App* cmd = app.add_subcommand("simulate", "Generate a synthetic recording with planted ground truth");
    cmd->add_option("-o,--out", out, "Output directory")->capture_default_str();
    duration_opt = cmd->add_option("--duration", duration, "Seconds of recording")->check(CLI::PositiveNumber);
    fps_opt = cmd->add_option("--fps", fps, "Video frame rate")->check(CLI::PositiveNumber);
    lag_opt = cmd->add_option("--lag", lag, "Tracker clock offset, seconds");
    scenario.add_to(*cmd);
    cmd->callback([this, &action] { action = [this] { return run(); }; });
  }
};

}  // namespace
}  // namespace ice::cli

int main(int argc, char** argv) {
  using namespace ice::cli;
  CLI::App app{"Interpersonal eye-gaze encoder"};
  app.set_version_flag("--version", std::string(ICE_VERSION));
  app.set_config("--config", "", "File of key=value defaults; command-line flags win");
  app.require_subcommand(1);

  std::function<int()> action;
  EncodeCommand encode;
  SyncCommand sync;
  EvalCommand eval;
  StatsCommand stats;
  FitCommand fit;
  SweepCommand sweep;
  SimulateCommand simulate;
  encode.attach(app, action);
  sync.attach(app, action);
  eval.attach(app, action);
  stats.attach(app, action);
  fit.attach(app, action);
  sweep.attach(app, action);
  simulate.attach(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    return action();
  } catch (const CommandError& e) {
    print_record(error_record(e.kind(), e.what(), e.exit_code()));
    return e.exit_code();
  } catch (const ice::Error& e) {
    const int code = exit_code_for(e.kind());
    print_record(error_record(std::string(ice::to_string(e.kind())), e.what(), code));
    return code;
  } catch (const std::exception& e) {
    print_record(error_record("Internal", e.what(), kFailure));
    return kFailure;
  }
}
