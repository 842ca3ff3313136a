#pragma once

#include <vector>

#include "blursplat/blur/blur_proposal.hpp"
#include "blursplat/blur/exposure.hpp"
#include "blursplat/blur/trajectory.hpp"
#include "blursplat/scene/render.hpp"

namespace blursplat::blur {

using scene::Camera;
using scene::Scene;

/// Pixels whose rendered alpha falls below this threshold get a zero mask.
inline constexpr double kUnderReconstructedAlpha = 0.5;

/// 1 where alpha >= 0.5, else 0.
Image alpha_gate(const Image& alpha);

/// One rendered view passed through the exposure affine and a blur proposal.
struct ProcessedView {
  scene::RenderOutput render;
  Image exposed;  // exposure applied to render.color
  Image gate;     // empty unless gating was requested
  Image color;    // proposal applied to `exposed`
  Image depth;    // proposal applied to render.depth
};

ProcessedView process_view(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                           const BlurProposal& bp, const ExposureParams& e, bool gate_by_alpha);

struct ViewGradients {
  scene::RenderGradients render;  // includes the pose twist gradient
  ExposureGradient exposure;
  BlurProposalGradient proposal;
};

ViewGradients process_view_backward(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                                    const BlurProposal& bp, const ExposureParams& e,
                                    const ProcessedView& view, const Image& color_adjoint,
                                    const Image& depth_adjoint);

struct SubframeBlur {
  Image color;
  Image depth;
  std::vector<SE3Pose> poses;
  std::vector<ProcessedView> views;
};

/// Mean of the processed sub-frame views along the virtual trajectory, for
/// color and depth alike.
SubframeBlur compose_subframe_blur(const Scene& scene, const Camera& cam,
                                   const VirtualTrajectory& vt,
                                   const std::vector<BlurProposal>& bps, const ExposureParams& e,
                                   bool gate_by_alpha = false);

struct SubframeGradients {
  std::vector<scene::GaussianGradient> scene;
  ExposureGradient exposure;
  std::vector<BlurProposalGradient> proposals;
  std::vector<Vec6> corrections;
  Vec6 start = Vec6::Zero();  // right perturbation of the start pose
  Vec6 end = Vec6::Zero();    // right perturbation of the end pose
};

SubframeGradients compose_subframe_blur_backward(const Scene& scene, const Camera& cam,
                                                 const VirtualTrajectory& vt,
                                                 const std::vector<BlurProposal>& bps,
                                                 const ExposureParams& e, const SubframeBlur& fwd,
                                                 const Image& color_adjoint,
                                                 const Image& depth_adjoint);

/// Adds `src` into `dst`, sizing `dst` on first use.
void accumulate(std::vector<scene::GaussianGradient>& dst,
                const std::vector<scene::GaussianGradient>& src, double scale = 1.0);

}  // namespace blursplat::blur
