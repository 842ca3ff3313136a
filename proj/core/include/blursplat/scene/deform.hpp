#pragma once

#include "blursplat/scene/gaussian.hpp"

namespace blursplat::scene {

/// Moves every Gaussian whose mean projects (nearest pixel) onto valid old and
/// new depth along the ray from the keyframe centre:
/// mu' = mu + ((d' - d) / d) (mu - t_K). Returns the number of moved Gaussians.
int deform_gaussians(Scene& scene, const SE3Pose& keyframe_pose, const Camera& cam,
                     const Image& depth_old, const Image& depth_new);

}  // namespace blursplat::scene
