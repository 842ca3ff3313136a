#pragma once

// Scalar-generic projection shared by the rasterizer and its gradient code.

#include "blursplat/geometry/lie.hpp"
#include "blursplat/scene/gaussian.hpp"

namespace blursplat::scene::detail {

/// Outputs of projecting one Gaussian: image-plane mean, conic (inverse
/// 2D covariance entries a, b, c) and camera-space depth.
template <typename T>
struct ProjectedT {
  T u, v;
  T conic_a, conic_b, conic_c;
  T depth;
  T cov00, cov01, cov11;
};

template <typename T>
ProjectedT<T> project_generic(const geometry::Vec3T<T>& mean, const geometry::Vec4T<T>& quat,
                              const geometry::Vec3T<T>& scale, const geometry::RigidT<T>& pose,
                              const Camera& cam) {
  using geometry::Mat3T;
  using geometry::Vec3T;
  const Mat3T<T> w = geometry::quat_to_rotation(pose.q).transpose();
  const Vec3T<T> pc = w * (mean - pose.t);
  const Mat3T<T> r = geometry::quat_to_rotation(quat);
  Mat3T<T> rs = r;
  for (int k = 0; k < 3; ++k) rs.col(k) *= scale(k);
  const Mat3T<T> wrs = w * rs;
  const Mat3T<T> cov_cam = wrs * wrs.transpose();

  const T z = pc(2);
  const T inv_z = T(1) / z;
  Eigen::Matrix<T, 2, 3> j;
  j << T(cam.fx) * inv_z, T(0), -T(cam.fx) * pc(0) * inv_z * inv_z,
       T(0), T(cam.fy) * inv_z, -T(cam.fy) * pc(1) * inv_z * inv_z;
  const Eigen::Matrix<T, 2, 2> cov2 = j * cov_cam * j.transpose();

  ProjectedT<T> out;
  out.u = T(cam.fx) * pc(0) * inv_z + T(cam.cx);
  out.v = T(cam.fy) * pc(1) * inv_z + T(cam.cy);
  out.cov00 = cov2(0, 0) + T(kCovarianceFloor);
  out.cov01 = T(0.5) * (cov2(0, 1) + cov2(1, 0));
  out.cov11 = cov2(1, 1) + T(kCovarianceFloor);
  const T det = out.cov00 * out.cov11 - out.cov01 * out.cov01;
  out.conic_a = out.cov11 / det;
  out.conic_b = -out.cov01 / det;
  out.conic_c = out.cov00 / det;
  out.depth = z;
  return out;
}

}  // namespace blursplat::scene::detail
