#pragma once

#include <vector>

#include "blursplat/tracking/trajectory_io.hpp"

namespace blursplat::pipeline {

using tracking::Trajectory;

struct AteResult {
  double rmse = 0.0;
  int matched = 0;
  geometry::SE3Pose alignment;  // applied to the estimate
};

/// Pairs each estimated pose with the nearest ground-truth timestamp within
/// `max_dt` seconds, rigidly aligns the estimated positions onto the
/// ground truth (no scale) and returns the RMS position residual.
/// Throws ContractError with fewer than three pairs.
AteResult absolute_trajectory_error(const Trajectory& est, const Trajectory& gt, double max_dt = 0.02);

inline double ate_rmse(const Trajectory& est, const Trajectory& gt, double max_dt = 0.02) {
  return absolute_trajectory_error(est, gt, max_dt).rmse;
}

}  // namespace blursplat::pipeline
