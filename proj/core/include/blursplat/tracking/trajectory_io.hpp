#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "blursplat/tracking/tracker.hpp"

namespace blursplat::tracking {

using Trajectory = std::vector<TimedPose>;

/// TUM format: "timestamp tx ty tz qx qy qz qw" per line, '#' comments.
void write_tum(std::ostream& os, const Trajectory& traj);
Trajectory read_tum(std::istream& is);

void save_tum(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_tum(const std::filesystem::path& path);

}  // namespace blursplat::tracking
