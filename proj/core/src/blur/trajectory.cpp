#include "blursplat/blur/trajectory.hpp"

#include <unsupported/Eigen/AutoDiff>

#include "blursplat/error.hpp"

namespace blursplat::blur {

VirtualTrajectory::VirtualTrajectory(const SE3Pose& start_pose, const SE3Pose& end_pose, int n)
    : n_sub(n), start(start_pose), end(end_pose), corrections(static_cast<std::size_t>(std::max(n, 0)), Vec6::Zero()) {
  validate();
}

void VirtualTrajectory::validate() const {
  if (n_sub < 1) throw ContractError("virtual trajectory needs at least one sub-frame");
  if (corrections.size() != static_cast<std::size_t>(n_sub))
    throw ContractError("virtual trajectory correction count differs from n_sub");
  for (const Vec6& c : corrections) {
    if (!c.allFinite()) throw ContractError("virtual trajectory corrections must be finite");
  }
}

double subframe_time(int k, int n_sub) {
  return n_sub == 1 ? 0.5 : static_cast<double>(k) / (n_sub - 1);
}

namespace {

template <typename T>
geometry::RigidT<T> subframe_pose(const geometry::RigidT<T>& start, const geometry::RigidT<T>& end,
                                  const geometry::Vec6T<T>& correction, double u) {
  return geometry::se3_geodesic<T>(start, end, T(u)) * geometry::se3_exp<T>(correction);
}

}  // namespace

std::vector<SE3Pose> interpolate_subframe_poses(const VirtualTrajectory& vt) {
  vt.validate();
  std::vector<SE3Pose> poses;
  poses.reserve(static_cast<std::size_t>(vt.n_sub));
  for (int k = 0; k < vt.n_sub; ++k) {
    poses.push_back(SE3Pose::from_rigid(subframe_pose<double>(
        vt.start.rigid(), vt.end.rigid(), vt.corrections[k], subframe_time(k, vt.n_sub))));
  }
  return poses;
}

Eigen::Matrix<double, 6, 18> subframe_pose_jacobian(const VirtualTrajectory& vt, int k) {
  vt.validate();
  if (k < 0 || k >= vt.n_sub) throw ContractError("sub-frame index out of range");
  using Jet = Eigen::AutoDiffScalar<Eigen::Matrix<double, 18, 1>>;
  geometry::Vec6T<Jet> ds, de, dc;
  for (int i = 0; i < 6; ++i) {
    ds(i) = Jet(0.0, 18, i);
    de(i) = Jet(0.0, 18, 6 + i);
    dc(i) = Jet(vt.corrections[k](i), 18, 12 + i);
  }
  const auto lift = [](const SE3Pose& p) {
    geometry::RigidT<Jet> r;
    r.q = p.quaternion().cast<Jet>();
    r.t = p.translation().cast<Jet>();
    return r;
  };
  const geometry::RigidT<Jet> start = lift(vt.start) * geometry::se3_exp<Jet>(ds);
  const geometry::RigidT<Jet> end = lift(vt.end) * geometry::se3_exp<Jet>(de);
  const geometry::RigidT<Jet> pose = subframe_pose<Jet>(start, end, dc, subframe_time(k, vt.n_sub));
  const SE3Pose nominal = interpolate_subframe_poses(vt)[static_cast<std::size_t>(k)];
  const geometry::Vec6T<Jet> eps = geometry::se3_log<Jet>(lift(nominal.inverse()) * pose);
  Eigen::Matrix<double, 6, 18> jac;
  for (int i = 0; i < 6; ++i) jac.row(i) = eps(i).derivatives().transpose();
  return jac;
}

}  // namespace blursplat::blur
