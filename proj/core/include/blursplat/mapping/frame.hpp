#pragma once

#include <map>
#include <optional>
#include <vector>

#include "blursplat/blur/blur_proposal.hpp"
#include "blursplat/blur/exposure.hpp"
#include "blursplat/blur/trajectory.hpp"
#include "blursplat/detect/classifier.hpp"
#include "blursplat/scene/gaussian.hpp"

namespace blursplat::mapping {

using blur::BlurProposal;
using blur::ExposureParams;
using blur::VirtualTrajectory;
using detect::FrameClass;
using geometry::SE3Pose;
using geometry::Vec3;
using geometry::Vec6;
using imaging::Image;
using scene::Camera;
using scene::Scene;

/// One level of the coarse-to-fine schedule.
struct ScaleLevel {
  int factor = 1;       // image downscale factor
  int kernel_size = 3;  // blur-proposal support
  int iterations = 200;
};

std::vector<ScaleLevel> default_schedule(int iterations_per_level = 200);

/// Per-frame parameters owned by one scale level.
struct LevelParams {
  ExposureParams exposure;
  std::vector<BlurProposal> proposals;  // 1 for Deblurred, n_sub for Fail, none for Sharp
};

struct FrameRecord {
  int index = 0;
  double timestamp = 0.0;
  Image image_obs;  // Linear RGB at full resolution
  Image depth_obs;  // metres, <= 0 where unknown
  FrameClass frame_class = FrameClass::Sharp;
  SE3Pose pose;                                 // Sharp and Deblurred frames
  std::optional<VirtualTrajectory> trajectory;  // Fail frames
  std::map<int, LevelParams> levels;            // keyed by downscale factor
  Image valid_mask;                             // optional; 1 marks usable pixels

  void validate() const;

  /// Creates the parameters for `level` if missing. A new level starts from
  /// the exposure of the nearest coarser level and zero proposal logits.
  LevelParams& prepare_level(const ScaleLevel& level, const Camera& full_cam, int grid = 4);
  const LevelParams& level(int factor) const;

  /// Representative pose: the tracked pose, or the trajectory midpoint.
  SE3Pose reference_pose() const;
};

/// Observation images at one scale, with the validity masks used by the losses.
struct ScaledObservation {
  Camera cam;
  Image color;
  Image depth;
  Image color_valid;  // 1 channel
};

ScaledObservation observe(const FrameRecord& fr, const Camera& full_cam, int factor);

}  // namespace blursplat::mapping
