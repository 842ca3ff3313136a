#pragma once

#include <string>
#include <vector>

#include "blursplat/detect/metric.hpp"

namespace blursplat::detect {

enum class FrameClass { Sharp, Deblurred, Fail };
enum class Screening { Sharp, CandidateBlurry };

std::string to_string(FrameClass c);
FrameClass parse_frame_class(const std::string& text);

struct ClassifierThresholds {
  double tau_sharp = 0.0;
  double tau_success = 1.2;
  double weight_laplacian = 0.5;
};

/// Guard for the Laplacian-variance ratio denominator.
inline constexpr double kLaplacianEpsilon = 1e-12;

/// Sharp iff metric.normalized(raw_score) < tau_sharp.
Screening classify_frame(double raw_score, const ClassifierThresholds& th, const MetricPlugin& metric);

struct DeblurCheck {
  double laplacian_ratio = 0.0;
  double metric_gain = 0.0;  // drop in normalized blur score
  double combined = 0.0;
  FrameClass verdict = FrameClass::Fail;
};

/// combined = w * lapvar(out) / max(lapvar(in), eps) + (1 - w) * gain;
/// Deblurred iff combined > tau_success.
DeblurCheck deblur_success(const Image& input, const Image& deblurred,
                           const ClassifierThresholds& th, const MetricPlugin& metric);

/// Threshold that best puts `below` under it and `above` over it: the
/// midpoint of the adjacent sorted pair with the fewest misclassifications
/// (ties broken towards the smaller threshold).
double separating_threshold(const std::vector<double>& below, const std::vector<double>& above);

/// separating_threshold of the normalized sharp and blurred raw scores.
double calibrate_tau_sharp(const std::vector<double>& sharp_raw,
                           const std::vector<double>& blurred_raw, const MetricPlugin& metric);

/// separating_threshold of the combined scores of failed restorations
/// (below) and successful ones (above).
double calibrate_tau_success(const std::vector<double>& failed_combined,
                             const std::vector<double>& restored_combined);

}  // namespace blursplat::detect
