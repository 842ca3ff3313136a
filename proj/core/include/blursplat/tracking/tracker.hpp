#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "blursplat/detect/classifier.hpp"
#include "blursplat/geometry/se3.hpp"
#include "blursplat/imaging/image.hpp"

namespace blursplat::tracking {

using detect::FrameClass;
using geometry::SE3Pose;
using imaging::Image;

struct TrackerEstimate {
  SE3Pose pose;
  Image depth;
};

/// Frame-to-map tracker. `frame` identifies the frame for oracle providers.
class TrackerProvider {
 public:
  virtual ~TrackerProvider() = default;
  virtual TrackerEstimate estimate(int frame, const Image& img, const Image& depth_prior,
                                   const SE3Pose& prev_pose) = 0;
};

class DepthProvider {
 public:
  virtual ~DepthProvider() = default;
  virtual Image mono_depth(int frame, const Image& img) = 0;
};

struct DeblurResult {
  Image image;
  double confidence = 0.0;  // in [0, 1]
};

class DeblurProvider {
 public:
  virtual ~DeblurProvider() = default;
  virtual DeblurResult deblur(int frame, const Image& img) = 0;
};

/// Returns the known pose of each frame and passes the depth prior through.
class GroundTruthTracker : public TrackerProvider {
 public:
  explicit GroundTruthTracker(std::vector<SE3Pose> poses) : poses_(std::move(poses)) {}
  TrackerEstimate estimate(int frame, const Image& img, const Image& depth_prior,
                           const SE3Pose& prev_pose) override;
  std::size_t calls() const { return calls_; }

 private:
  std::vector<SE3Pose> poses_;
  std::size_t calls_ = 0;
};

/// Returns the known depth map of each frame.
class GroundTruthDepth : public DepthProvider {
 public:
  explicit GroundTruthDepth(std::vector<Image> depths) : depths_(std::move(depths)) {}
  Image mono_depth(int frame, const Image& img) override;

 private:
  std::vector<Image> depths_;
};

/// Fronto-parallel plane at a fixed distance.
class PlanarDepthOracle : public DepthProvider {
 public:
  explicit PlanarDepthOracle(double distance) : distance_(distance) {}
  Image mono_depth(int frame, const Image& img) override;

 private:
  double distance_;
};

/// Knows the sharp middle sub-frame of frames it can restore; for any other
/// frame it returns the input unchanged with zero confidence.
class MiddleFrameDeblurOracle : public DeblurProvider {
 public:
  explicit MiddleFrameDeblurOracle(std::map<int, Image> restorable)
      : restorable_(std::move(restorable)) {}
  DeblurResult deblur(int frame, const Image& img) override;

 private:
  std::map<int, Image> restorable_;
};

struct Providers {
  TrackerProvider* tracker = nullptr;
  DepthProvider* depth = nullptr;
  DeblurProvider* deblur = nullptr;
};

struct TimedPose {
  double timestamp = 0.0;
  SE3Pose pose;
};

/// Most recent poses, oldest first, with strictly increasing timestamps.
class PoseHistory {
 public:
  explicit PoseHistory(std::size_t capacity = 8);
  void push(double timestamp, const SE3Pose& pose);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// back(0) is the newest entry.
  const TimedPose& back(std::size_t age = 0) const;

 private:
  std::size_t capacity_;
  std::deque<TimedPose> entries_;
};

/// T_t = T_{t-1} * (T_{t-1} * T_{t-2}^-1).
SE3Pose constant_velocity_extrapolate(const PoseHistory& h);

struct DetectorState {
  detect::ClassifierThresholds thresholds;
  detect::MetricPlugin metric = detect::builtin_sharpness_metric();
  /// Skips the detector and assigns this class to every frame.
  std::optional<FrameClass> forced;
};

struct TrackedFrame {
  int frame = 0;
  SE3Pose pose;
  Image depth;
  FrameClass frame_class = FrameClass::Sharp;
  Image observation;  // the input, or the restored image for Deblurred frames
  double blur_score = 0.0;
  std::optional<detect::DeblurCheck> deblur_check;
};

/// One step of the blur-aware tracking loop. Fail frames take the
/// constant-velocity pose (or the previous pose while fewer than two poses
/// are known) and the monocular depth; other frames go through the tracker.
/// The resulting pose is appended to `history`.
TrackedFrame track_frame(int frame, double timestamp, const Image& img, PoseHistory& history,
                         const Providers& providers, const DetectorState& detector);

}  // namespace blursplat::tracking
