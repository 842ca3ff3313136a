#include "blursplat/tracking/trajectory_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "blursplat/error.hpp"

namespace blursplat::tracking {

void write_tum(std::ostream& os, const Trajectory& traj) {
  os << "# timestamp tx ty tz qx qy qz qw\n" << std::setprecision(17);
  for (const TimedPose& p : traj) {
    const auto& t = p.pose.translation();
    const auto& q = p.pose.quaternion();
    os << p.timestamp << ' ' << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q(1) << ' '
       << q(2) << ' ' << q(3) << ' ' << q(0) << '\n';
  }
}

Trajectory read_tum(std::istream& is) {
  Trajectory traj;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    ls >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw;
    std::string extra;
    if (ls.fail() || (ls >> extra))
      throw IoError("trajectory line " + std::to_string(line_no) + ": expected 8 numbers");
    try {
      traj.push_back({ts, SE3Pose(geometry::Vec4(qw, qx, qy, qz), geometry::Vec3(tx, ty, tz))});
    } catch (const ContractError& e) {
      throw IoError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return traj;
}

void save_tum(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_tum(os, traj);
}

Trajectory load_tum(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_tum(is);
}

}  // namespace blursplat::tracking
