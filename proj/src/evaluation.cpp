#include "ice/evaluation.hpp"

#include "ice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace ice {

ConfusionCounts confusion(const EncodedTrace& pred, const std::vector<bool>& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::LengthMismatch, "prediction and truth differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.codes[i] == kMissingRegion) continue;
    const bool p = pred.codes[i] == kCenterRegion;
    const bool t = truth[i];
    if (p && t) ++c.tp;
    else if (p && !t) ++c.fp;
    else if (!p && t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

EvalReport metrics(const ConfusionCounts& c) {
  const std::size_t n = c.total();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "metrics need at least one counted frame");
  EvalReport r;
  r.n_frames = n;
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  const auto tn = static_cast<double>(c.tn);

  auto ratio = [&r](double num, double den, const char* name) {
    if (den == 0.0) {
      r.degenerate.emplace_back(name);
      return 0.0;
    }
    return num / den;
  };
  r.accuracy = (tp + tn) / static_cast<double>(n);
  r.precision = ratio(tp, tp + fp, "precision");
  r.recall = ratio(tp, tp + fn, "recall");
  r.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn, "f1");
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = std::clamp(ratio(tp * tn - fp * fn, std::sqrt(den), "mcc"), -1.0, 1.0);
  return r;
}

AlignedEvaluation align_for_evaluation(const EncodedTrace& pred, std::span<const double> truth_timestamps,
                                       const std::vector<bool>& truth_on_target, double lag_seconds,
                                       double fps) {
  if (truth_timestamps.size() != truth_on_target.size()) {
    throw Error(ErrorKind::LengthMismatch, "truth timestamps and flags differ in length");
  }
  std::vector<double> shifted(truth_timestamps.begin(), truth_timestamps.end());
  for (double& t : shifted) t -= lag_seconds;

  const EncodedTrace p = downsample_encoded(pred, fps, 0.0);
  const FlagSeries q = downsample_flags(shifted, truth_on_target, fps, 0.0);

  std::unordered_map<std::int64_t, bool> truth_by_window;
  truth_by_window.reserve(q.timestamps.size());
  for (std::size_t i = 0; i < q.timestamps.size(); ++i) {
    truth_by_window.emplace(window_index(q.timestamps[i], 0.0, fps), q.values[i]);
  }
  AlignedEvaluation out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto it = truth_by_window.find(window_index(p.timestamps[i], 0.0, fps));
    if (it == truth_by_window.end()) continue;
    out.pred.timestamps.push_back(p.timestamps[i]);
    out.pred.codes.push_back(p.codes[i]);
    out.truth.push_back(it->second);
  }
  return out;
}

std::vector<bool> on_target_from_box(const GroundTruthTrace& truth, const RveBox& face_box) {
  if (!truth.has_coordinates()) {
    throw Error(ErrorKind::InvalidArgument, "ground truth has no coordinates");
  }
  std::vector<bool> out(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) out[i] = face_box.contains(truth.x[i], truth.y[i]);
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "pearson inputs differ in length");
  if (a.size() < 2) throw Error(ErrorKind::DegenerateInput, "pearson needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw Error(ErrorKind::DegenerateInput, "zero variance input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

RatingCorrelation rating_correlation(std::span<const double> rve_fractions, std::span<const int> ratings) {
  if (rve_fractions.size() != ratings.size()) {
    throw Error(ErrorKind::LengthMismatch, "fractions and ratings differ in length");
  }
  std::map<int, std::pair<std::size_t, double>> by_rating;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    auto& [count, sum] = by_rating[ratings[i]];
    ++count;
    sum += rve_fractions[i];
  }
  if (by_rating.size() < 2) {
    throw Error(ErrorKind::DegenerateInput, "need at least two distinct rating values");
  }

  RatingCorrelation out;
  std::vector<double> r_as_double(ratings.begin(), ratings.end());
  out.per_recording_r = pearson(rve_fractions, r_as_double);

  std::vector<double> levels, means;
  for (const auto& [rating, agg] : by_rating) {
    const double mean = agg.second / static_cast<double>(agg.first);
    out.table.push_back({rating, agg.first, mean});
    levels.push_back(rating);
    means.push_back(mean);
  }
  out.per_rating_mean_r = pearson(levels, means);
  return out;
}

}  // namespace ice
