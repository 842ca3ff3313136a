#pragma once

#include <Eigen/Core>
#include <vector>

#include "blursplat/geometry/se3.hpp"

namespace blursplat::blur {

using geometry::SE3Pose;
using geometry::Vec6;

/// Camera path over one exposure: geodesic from `start` to `end` sampled at
/// n_sub instants, each right-composed with its own correction twist.
struct VirtualTrajectory {
  int n_sub = 3;
  SE3Pose start;
  SE3Pose end;
  std::vector<Vec6> corrections;  // [theta; rho], one per sub-frame

  VirtualTrajectory() = default;
  VirtualTrajectory(const SE3Pose& start, const SE3Pose& end, int n_sub);

  void validate() const;
};

/// k / (n - 1), or 0.5 when n == 1.
double subframe_time(int k, int n_sub);

/// pose_k = exp(u_k log(end * start^-1)) * start * exp(correction_k).
std::vector<SE3Pose> interpolate_subframe_poses(const VirtualTrajectory& vt);

/// Jacobian of the right perturbation at pose_k w.r.t. the 18 parameters
/// (delta_start, delta_end, delta_correction_k), where the endpoints are
/// perturbed as start * exp(delta_start), end * exp(delta_end) and the
/// correction additively.
Eigen::Matrix<double, 6, 18> subframe_pose_jacobian(const VirtualTrajectory& vt, int k);

}  // namespace blursplat::blur
