#pragma once

#include <vector>

#include "blursplat/scene/gaussian.hpp"

namespace blursplat::scene {

using geometry::Vec6;

inline constexpr double kAlphaMax = 0.99;
inline constexpr double kTransmittanceMin = 1e-4;
/// Contributions with exponent below this are treated as exactly zero.
inline constexpr double kPowerCutoff = -18.0;

struct RenderOutput {
  Image color;  // Linear, 3 channels
  Image depth;  // alpha-weighted camera-space z, 1 channel
  Image alpha;  // 1 - final transmittance
};

/// Front-to-back alpha compositing of depth-sorted splats on a black,
/// zero-depth background.
RenderOutput render(const Scene& scene, const Camera& cam, const SE3Pose& pose);

struct GaussianGradient {
  Vec3 mean = Vec3::Zero();
  Vec4 rotation = Vec4::Zero();  // w.r.t. the raw (unnormalized) quaternion
  Vec3 scale = Vec3::Zero();
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
};

struct RenderGradients {
  std::vector<GaussianGradient> gaussians;
  /// Gradient w.r.t. a right perturbation pose * exp(xi), xi = [theta; rho].
  Vec6 pose = Vec6::Zero();
};

/// Reverse-mode derivatives of render() given per-pixel adjoints of color
/// (3 channels) and depth (1 channel). The depth sort is held fixed and the
/// opacity clamp passes no gradient.
RenderGradients render_gradients(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                                 const Image& color_adjoint, const Image& depth_adjoint);

}  // namespace blursplat::scene
