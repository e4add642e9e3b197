#include "ice/pipeline.hpp"

namespace ice {

EncodeOutcome encode_recording(const GazeTrace& trace, const PipelineOptions& options) {
  const FilteredTrace filtered = filter_confidence(trace, options.confidence_threshold);
  const GazeTrace calibration = downsample_raw(filtered.kept, options.fps);

  EncodeOutcome out;
  out.encoder = options.prefix_seconds ? fit_encoder_prefix(calibration, options.ice, *options.prefix_seconds)
                                       : fit_encoder(calibration, options.ice);
  if (!out.encoder) return out;
  out.native = encode(*out.encoder, trace, filtered.mask);
  out.downsampled = downsample_encoded(out.native, options.fps, 0.0);
  return out;
}

std::optional<EvalReport> evaluate_scenario(const LabeledTrace& labeled, const ScenarioSpec& spec,
                                            const PipelineOptions& options) {
  const EncodeOutcome enc = encode_recording(labeled.trace, options);
  if (!enc.encoder) return std::nullopt;
  const AlignedEvaluation aligned = align_for_evaluation(enc.native, labeled.tracker.timestamps,
                                                         labeled.tracker.on_target, spec.planted_lag_seconds,
                                                         options.fps);
  return metrics(confusion(aligned.pred, aligned.truth));
}

}  // namespace ice
