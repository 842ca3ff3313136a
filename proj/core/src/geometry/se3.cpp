#include "blursplat/geometry/se3.hpp"

#include <cmath>
#include <limits>

#include "blursplat/error.hpp"

namespace blursplat::geometry {

SE3Pose::SE3Pose(const Vec4& q, const Vec3& translation) : t_(translation) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ContractError("SE3Pose: quaternion must be non-zero and finite");
  // Leave unit quaternions bit-identical so text round trips are lossless.
  q_ = std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? q : Vec4(q / n);
}

SE3Pose::SE3Pose(const Eigen::Quaterniond& q, const Vec3& translation)
    : SE3Pose(Vec4(q.w(), q.x(), q.y(), q.z()), translation) {}

SE3Pose SE3Pose::from_matrix(const Mat4& m) {
  const Eigen::Quaterniond q(Mat3(m.topLeftCorner<3, 3>()));
  return SE3Pose(q, m.topRightCorner<3, 1>());
}

SE3Pose SE3Pose::exp(const Vec6& xi) { return from_rigid(se3_exp<double>(xi)); }

Mat4 SE3Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = t_;
  return m;
}

Vec6 SE3Pose::log() const { return se3_log<double>(rigid()); }

SE3Pose SE3Pose::inverse() const { return from_rigid(rigid().inverse()); }

SE3Pose SE3Pose::operator*(const SE3Pose& other) const {
  return from_rigid(rigid() * other.rigid());
}

double rotation_angle_between(const SE3Pose& a, const SE3Pose& b) {
  const Vec4 d = quat_multiply<double>(quat_conjugate<double>(a.quaternion()), b.quaternion());
  return so3_log<double>(d).norm();
}

double translation_distance(const SE3Pose& a, const SE3Pose& b) {
  return (a.translation() - b.translation()).norm();
}

}  // namespace blursplat::geometry
