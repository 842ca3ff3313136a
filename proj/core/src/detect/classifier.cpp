#include "blursplat/detect/classifier.hpp"

#include <algorithm>
#include <limits>

#include "blursplat/error.hpp"
#include "blursplat/imaging/metrics.hpp"

namespace blursplat::detect {

std::string to_string(FrameClass c) {
  switch (c) {
    case FrameClass::Sharp: return "sharp";
    case FrameClass::Deblurred: return "deblurred";
    case FrameClass::Fail: return "fail";
  }
  return "?";
}

FrameClass parse_frame_class(const std::string& text) {
  if (text == "sharp") return FrameClass::Sharp;
  if (text == "deblurred") return FrameClass::Deblurred;
  if (text == "fail") return FrameClass::Fail;
  throw IoError("unknown frame class '" + text + "'");
}

Screening classify_frame(double raw_score, const ClassifierThresholds& th, const MetricPlugin& metric) {
  return metric.normalized(raw_score) < th.tau_sharp ? Screening::Sharp : Screening::CandidateBlurry;
}

DeblurCheck deblur_success(const Image& input, const Image& deblurred,
                           const ClassifierThresholds& th, const MetricPlugin& metric) {
  if (!input.same_shape(deblurred)) throw ContractError("deblur check images differ in shape");
  DeblurCheck r;
  r.laplacian_ratio = imaging::laplacian_variance(deblurred) /
                      std::max(imaging::laplacian_variance(input), kLaplacianEpsilon);
  r.metric_gain = metric.normalized(metric.score(input)) - metric.normalized(metric.score(deblurred));
  r.combined = th.weight_laplacian * r.laplacian_ratio + (1.0 - th.weight_laplacian) * r.metric_gain;
  r.verdict = r.combined > th.tau_success ? FrameClass::Deblurred : FrameClass::Fail;
  return r;
}

double separating_threshold(const std::vector<double>& below, const std::vector<double>& above) {
  if (below.empty() || above.empty()) throw ContractError("calibration needs samples of both classes");
  std::vector<std::pair<double, bool>> all;  // (value, belongs above)
  for (double v : below) all.emplace_back(v, false);
  for (double v : above) all.emplace_back(v, true);
  std::sort(all.begin(), all.end());

  // Threshold between all[i] and all[i+1]: everything up to i falls below.
  std::size_t errors = below.size();
  std::size_t best_errors = errors;
  double best = all.front().first - 1.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    errors += all[i].second ? 1 : 0;
    errors -= all[i].second ? 0 : 1;
    const double next = i + 1 < all.size() ? all[i + 1].first : all[i].first + 1.0;
    if (next == all[i].first) continue;
    if (errors < best_errors) {
      best_errors = errors;
      best = 0.5 * (all[i].first + next);
    }
  }
  return best;
}

double calibrate_tau_sharp(const std::vector<double>& sharp_raw,
                           const std::vector<double>& blurred_raw, const MetricPlugin& metric) {
  std::vector<double> sharp, blurred;
  for (double s : sharp_raw) sharp.push_back(metric.normalized(s));
  for (double b : blurred_raw) blurred.push_back(metric.normalized(b));
  return separating_threshold(sharp, blurred);
}

double calibrate_tau_success(const std::vector<double>& failed_combined,
                             const std::vector<double>& restored_combined) {
  return separating_threshold(failed_combined, restored_combined);
}

}  // namespace blursplat::detect
