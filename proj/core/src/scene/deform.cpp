#include "blursplat/scene/deform.hpp"

#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::scene {

int deform_gaussians(Scene& scene, const SE3Pose& keyframe_pose, const Camera& cam,
                     const Image& depth_old, const Image& depth_new) {
  if (depth_old.width() != cam.width || depth_old.height() != cam.height ||
      !depth_old.same_shape(depth_new) || depth_old.channels() != 1)
    throw ContractError("deformation depth maps must be single-channel and match the camera");
  const Vec3 center = keyframe_pose.translation();
  int moved = 0;
  for (Gaussian3D& g : scene) {
    const Vec3 pc = keyframe_pose.to_camera(g.mean);
    if (!(pc.z() > kNearPlane)) continue;
    const Vec2 px = cam.project(pc);
    const long x = std::lround(px.x());
    const long y = std::lround(px.y());
    if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) continue;
    const double d = depth_old.at(static_cast<int>(x), static_cast<int>(y));
    const double d_new = depth_new.at(static_cast<int>(x), static_cast<int>(y));
    if (!(d > 0.0) || !(d_new > 0.0)) continue;
    g.mean += ((d_new - d) / d) * (g.mean - center);
    ++moved;
  }
  return moved;
}

}  // namespace blursplat::scene
