#pragma once

#include <vector>

#include "blursplat/blur/subframe.hpp"
#include "blursplat/mapping/frame.hpp"
#include "blursplat/scene/render.hpp"

namespace blursplat::mapping {

using scene::GaussianGradient;

struct LossWeights {
  double lambda_rgb = 0.9;
  double lambda_depth = 0.1;
  double lambda_sparse = 0.01;
  double lambda_reg = 0.001;
  double w_sharp = 1.0;
  double w_deblur = 0.5;
  double w_fail = 0.5;

  /// Throws ConfigError on negative weights.
  void validate() const;
  double class_weight(FrameClass c) const;
};

/// Gradients of one frame's own parameters at one scale.
struct FrameGradient {
  blur::ExposureGradient exposure;
  std::vector<blur::BlurProposalGradient> proposals;
  std::vector<Vec6> corrections;
  Vec6 start = Vec6::Zero();
  Vec6 end = Vec6::Zero();

  void scale_by(double s);
};

struct LossResult {
  double value = 0.0;
  std::vector<GaussianGradient> scene;
  FrameGradient frame;
};

/// Pixels with rendered alpha below this value carry no depth loss.
inline constexpr double kDepthAlphaMin = 0.5;

/// Scales for which each loss is evaluated: `level.factor` picks the
/// observation resolution and the frame's parameters at that factor.
/// `gate_by_alpha` zeroes the blur mask where the render is under-reconstructed.
struct LossOptions {
  int factor = 1;
  bool gate_by_alpha = true;
};

/// w_sharp * (lambda_rgb * L1(color) + lambda_depth * L1(depth)). Pose held fixed.
LossResult loss_sharp(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                      const LossWeights& lw, const LossOptions& opt = {});

/// lambda_rgb * L1(color) + lambda_depth * L1(depth) + lambda_sparse * mean(m)
/// on the exposure-adjusted, proposal-blurred render. Pose held fixed.
LossResult loss_deblur(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                       const LossWeights& lw, const LossOptions& opt = {});

/// Same terms on the mean of the processed sub-frame renders along the
/// frame's virtual trajectory.
LossResult loss_fail(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                     const LossWeights& lw, const LossOptions& opt = {});

struct TotalLoss {
  double value = 0.0;
  double sharp = 0.0;  // weighted per-class sums
  double deblurred = 0.0;
  double fail = 0.0;
  double regularizer = 0.0;
  std::vector<GaussianGradient> scene;
  std::vector<FrameGradient> frames;  // parallel to the frame list
};

/// Sharp frames contribute loss_sharp (already weighted by w_sharp); the
/// other classes contribute w_deblur * loss_deblur and w_fail * loss_fail.
TotalLoss loss_total(const std::vector<FrameRecord>& frames, const Scene& scene, const Camera& cam,
                     const LossWeights& lw, const LossOptions& opt = {});

/// sum_i ||s_i - s_bar||_1 with s_bar the scene-mean scale vector.
double scale_spread(const Scene& scene);

/// loss_total + lambda_reg * scale_spread, with s_bar held constant.
TotalLoss loss_global(const std::vector<FrameRecord>& frames, const Scene& scene, const Camera& cam,
                      const LossWeights& lw, const LossOptions& opt = {});

}  // namespace blursplat::mapping
