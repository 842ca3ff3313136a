#include "blursplat/mapping/frame.hpp"

#include "blursplat/error.hpp"
#include "blursplat/imaging/filter.hpp"

namespace blursplat::mapping {

std::vector<ScaleLevel> default_schedule(int iterations_per_level) {
  return {{4, 3, iterations_per_level}, {2, 5, iterations_per_level}, {1, 9, iterations_per_level}};
}

void FrameRecord::validate() const {
  if (image_obs.channels() != 3) throw ContractError("frame observation must be RGB");
  if (!depth_obs.same_size(image_obs) || depth_obs.channels() != 1)
    throw ContractError("frame depth must be single-channel and match the image");
  if (!valid_mask.empty() && (!valid_mask.same_size(image_obs) || valid_mask.channels() != 1))
    throw ContractError("frame valid mask must be single-channel and match the image");
  if (frame_class == FrameClass::Fail) {
    if (!trajectory) throw ContractError("Fail frames must carry a virtual trajectory");
    trajectory->validate();
  } else if (trajectory) {
    throw ContractError("only Fail frames carry a virtual trajectory");
  }
}

LevelParams& FrameRecord::prepare_level(const ScaleLevel& level, const Camera& full_cam, int grid) {
  auto it = levels.find(level.factor);
  if (it != levels.end()) return it->second;
  LevelParams p;
  // std::map orders factors ascending, so the first larger key is the
  // nearest coarser level.
  const auto coarser = levels.upper_bound(level.factor);
  if (coarser != levels.end()) p.exposure = coarser->second.exposure;
  const Camera cam = full_cam.scaled(level.factor);
  const int count = frame_class == FrameClass::Fail      ? trajectory->n_sub
                    : frame_class == FrameClass::Deblurred ? 1
                                                           : 0;
  for (int k = 0; k < count; ++k) p.proposals.emplace_back(level.kernel_size, cam.width, cam.height, grid);
  return levels.emplace(level.factor, std::move(p)).first->second;
}

const LevelParams& FrameRecord::level(int factor) const {
  const auto it = levels.find(factor);
  if (it == levels.end())
    throw ContractError("frame " + std::to_string(index) + " has no parameters at scale 1/" +
                        std::to_string(factor));
  return it->second;
}

SE3Pose FrameRecord::reference_pose() const {
  if (!trajectory) return pose;
  return SE3Pose::from_rigid(geometry::se3_geodesic<double>(trajectory->start.rigid(),
                                                            trajectory->end.rigid(), 0.5));
}

ScaledObservation observe(const FrameRecord& fr, const Camera& full_cam, int factor) {
  ScaledObservation o;
  o.cam = full_cam.scaled(factor);
  o.color = imaging::downscale(fr.image_obs, factor);
  // Block-averaging would blend valid and invalid depth; keep a block only if
  // every sample in it is valid.
  const Image depth = imaging::downscale(fr.depth_obs, factor);
  Image depth_valid(fr.depth_obs.width(), fr.depth_obs.height(), 1);
  for (std::size_t i = 0; i < depth_valid.size(); ++i)
    depth_valid.data()[i] = fr.depth_obs.data()[i] > 0.0 ? 1.0 : 0.0;
  const Image valid_frac = imaging::downscale(depth_valid, factor);
  o.depth = depth;
  for (std::size_t i = 0; i < o.depth.size(); ++i) {
    if (valid_frac.data()[i] < 1.0) o.depth.data()[i] = 0.0;
  }
  o.color_valid = fr.valid_mask.empty() ? Image(o.cam.width, o.cam.height, 1, imaging::ColorSpace::Linear, 1.0)
                                        : imaging::downscale(fr.valid_mask, factor);
  if (!fr.valid_mask.empty()) {
    for (double& v : o.color_valid.data()) v = v >= 1.0 ? 1.0 : 0.0;
  }
  return o;
}

}  // namespace blursplat::mapping
