#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "blursplat/geometry/lie.hpp"

namespace blursplat::geometry {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rigid camera pose in the world-from-camera convention:
/// x_world = rotation * x_camera + translation.
class SE3Pose {
 public:
  SE3Pose() = default;
  /// `q` is (w, x, y, z); it is normalized on construction.
  SE3Pose(const Vec4& q, const Vec3& translation);
  SE3Pose(const Eigen::Quaterniond& q, const Vec3& translation);

  static SE3Pose identity() { return {}; }
  static SE3Pose from_translation(const Vec3& t) { return SE3Pose(Vec4(1, 0, 0, 0), t); }
  static SE3Pose from_matrix(const Mat4& m);
  /// Twist ordered [theta; rho].
  static SE3Pose exp(const Vec6& xi);

  const Vec4& quaternion() const { return q_; }
  Eigen::Quaterniond rotation() const { return {q_(0), q_(1), q_(2), q_(3)}; }
  Mat3 rotation_matrix() const { return quat_to_rotation(q_); }
  const Vec3& translation() const { return t_; }
  Mat4 matrix() const;

  Vec6 log() const;
  SE3Pose inverse() const;
  SE3Pose operator*(const SE3Pose& other) const;
  Vec3 operator*(const Vec3& point) const { return rotation_matrix() * point + t_; }

  /// Camera-frame coordinates of a world point.
  Vec3 to_camera(const Vec3& world) const { return rotation_matrix().transpose() * (world - t_); }

  RigidT<double> rigid() const { return {q_, t_}; }
  static SE3Pose from_rigid(const RigidT<double>& g) { return SE3Pose(g.q, g.t); }

  bool operator==(const SE3Pose& other) const { return q_ == other.q_ && t_ == other.t_; }

 private:
  Vec4 q_ = Vec4(1, 0, 0, 0);
  Vec3 t_ = Vec3::Zero();
};

/// Geodesic distance helpers used by tests and evaluation.
double rotation_angle_between(const SE3Pose& a, const SE3Pose& b);
double translation_distance(const SE3Pose& a, const SE3Pose& b);

}  // namespace blursplat::geometry
