#pragma once

// End-to-end glue shared by the command-line tool and the tests: confidence
// filter, downsample, calibrate, encode, evaluate.

#include "ice/evaluation.hpp"
#include "ice/ice_core.hpp"
#include "ice/signal_io.hpp"
#include "ice/synth_oracle.hpp"

#include <optional>

namespace ice {

struct PipelineOptions {
  double confidence_threshold = 0.9;
  double fps = 3.0;  // calibration and output rate; at most the trace's nominal rate
  std::optional<double> prefix_seconds;
  IceConfig ice;
};

struct EncodeOutcome {
  std::optional<IceEncoder> encoder;  // nullopt on FAIL
  EncodedTrace native;                // one code per input frame, low confidence as Missing
  EncodedTrace downsampled;           // majority vote onto 1/fps windows from time 0
};

/// Calibrates on the confidence-filtered trace downsampled to options.fps and
/// encodes every input frame. On FAIL both code series are empty.
EncodeOutcome encode_recording(const GazeTrace& trace, const PipelineOptions& options);

/// Runs encode_recording on a generated scenario and scores it against the
/// tracker's on-target flags, shifted back by the planted lag, at
/// options.fps. nullopt on FAIL.
std::optional<EvalReport> evaluate_scenario(const LabeledTrace& labeled, const ScenarioSpec& spec,
                                            const PipelineOptions& options);

}  // namespace ice
