#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blursplat/detect/metric.hpp"
#include "blursplat/error.hpp"

namespace blursplat::detect {

/// Raised by cohens_d when every pair has the same score gap.
class DegenerateVarianceError : public NumericalError {
 public:
  DegenerateVarianceError() : NumericalError("degenerate-zero-variance") {}
};

struct ScorePair {
  double sharp = 0.0;
  double blur = 0.0;
};

struct PairScores {
  std::string metric_name;
  Polarity polarity = Polarity::HigherIsBlurrier;
  std::vector<ScorePair> pairs;
};

/// Mean |q_sharp - q_blur|.
double improvement_score(const PairScores& ps);
/// Mean absolute gap over the Bessel-corrected std of the signed gaps.
double cohens_d(const PairScores& ps);
/// Percentage of pairs whose blurred score lies strictly on the blurrier side.
double ranking_accuracy(const PairScores& ps);
double consistency_score(double accuracy_percent, double effect_size);

}  // namespace blursplat::detect
