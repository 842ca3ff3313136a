#include "blursplat/tracking/tracker.hpp"

#include <string>

#include "blursplat/error.hpp"

namespace blursplat::tracking {
namespace {

template <typename T>
const T& frame_entry(const std::vector<T>& items, int frame, const char* what) {
  if (frame < 0 || static_cast<std::size_t>(frame) >= items.size())
    throw ContractError(std::string(what) + " has no entry for frame " + std::to_string(frame));
  return items[static_cast<std::size_t>(frame)];
}

}  // namespace

TrackerEstimate GroundTruthTracker::estimate(int frame, const Image&, const Image& depth_prior,
                                             const SE3Pose&) {
  ++calls_;
  return {frame_entry(poses_, frame, "ground-truth tracker"), depth_prior};
}

Image GroundTruthDepth::mono_depth(int frame, const Image&) {
  return frame_entry(depths_, frame, "ground-truth depth");
}

Image PlanarDepthOracle::mono_depth(int, const Image& img) {
  return Image(img.width(), img.height(), 1, imaging::ColorSpace::Linear, distance_);
}

DeblurResult MiddleFrameDeblurOracle::deblur(int frame, const Image& img) {
  const auto it = restorable_.find(frame);
  if (it == restorable_.end()) return {img, 0.0};
  return {it->second, 1.0};
}

PoseHistory::PoseHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 2) throw ContractError("pose history must hold at least two poses");
}

void PoseHistory::push(double timestamp, const SE3Pose& pose) {
  if (!entries_.empty() && !(timestamp > entries_.back().timestamp))
    throw ContractError("pose history timestamps must increase strictly");
  entries_.push_back({timestamp, pose});
  if (entries_.size() > capacity_) entries_.pop_front();
}

const TimedPose& PoseHistory::back(std::size_t age) const {
  if (age >= entries_.size()) throw ContractError("pose history is too short");
  return entries_[entries_.size() - 1 - age];
}

SE3Pose constant_velocity_extrapolate(const PoseHistory& h) {
  if (h.size() < 2) throw ContractError("constant-velocity extrapolation needs two poses");
  const SE3Pose& last = h.back(0).pose;
  const SE3Pose relative = last * h.back(1).pose.inverse();
  return last * relative;
}

TrackedFrame track_frame(int frame, double timestamp, const Image& img, PoseHistory& history,
                         const Providers& providers, const DetectorState& detector) {
  if (providers.tracker == nullptr || providers.depth == nullptr || providers.deblur == nullptr)
    throw ContractError("track_frame needs tracker, depth and deblur providers");
  const auto context = [frame](const std::exception& e) {
    return Error("frame " + std::to_string(frame) + ": " + e.what());
  };

  TrackedFrame out;
  out.frame = frame;
  out.observation = img;
  try {
    const Image mono = providers.depth->mono_depth(frame, img);

    if (detector.forced) {
      out.frame_class = *detector.forced;
      if (out.frame_class == FrameClass::Deblurred)
        out.observation = providers.deblur->deblur(frame, img).image;
    } else {
      out.blur_score = detector.metric.score(img);
      if (detect::classify_frame(out.blur_score, detector.thresholds, detector.metric) ==
          detect::Screening::Sharp) {
        out.frame_class = FrameClass::Sharp;
      } else {
        const DeblurResult restored = providers.deblur->deblur(frame, img);
        out.deblur_check =
            detect::deblur_success(img, restored.image, detector.thresholds, detector.metric);
        out.frame_class = out.deblur_check->verdict;
        if (out.frame_class == FrameClass::Deblurred) out.observation = restored.image;
      }
    }

    if (out.frame_class == FrameClass::Fail) {
      if (history.size() >= 2) {
        out.pose = constant_velocity_extrapolate(history);
      } else if (!history.empty()) {
        out.pose = history.back().pose;
      }
      out.depth = mono;
    } else {
      const SE3Pose prev = history.empty() ? SE3Pose::identity() : history.back().pose;
      TrackerEstimate est = providers.tracker->estimate(frame, out.observation, mono, prev);
      out.pose = est.pose;
      out.depth = std::move(est.depth);
    }
  } catch (const Error& e) {
    throw context(e);
  }
  history.push(timestamp, out.pose);
  return out;
}

}  // namespace blursplat::tracking
