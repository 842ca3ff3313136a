#include "blursplat/pipeline/ate.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::pipeline {

AteResult absolute_trajectory_error(const Trajectory& est, const Trajectory& gt, double max_dt) {
  std::vector<geometry::Vec3> p_est, p_gt;
  for (const auto& e : est) {
    const auto best = std::min_element(gt.begin(), gt.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.timestamp - e.timestamp) < std::abs(b.timestamp - e.timestamp);
    });
    if (best == gt.end() || std::abs(best->timestamp - e.timestamp) > max_dt) continue;
    p_est.push_back(e.pose.translation());
    p_gt.push_back(best->pose.translation());
  }
  const std::size_t n = p_est.size();
  if (n < 3) throw ContractError("ATE needs at least three timestamp-matched poses");

  geometry::Vec3 mu_e = geometry::Vec3::Zero(), mu_g = geometry::Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_e += p_est[i];
    mu_g += p_gt[i];
  }
  mu_e /= static_cast<double>(n);
  mu_g /= static_cast<double>(n);
  geometry::Mat3 cov = geometry::Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) cov += (p_gt[i] - mu_g) * (p_est[i] - mu_e).transpose();
  const Eigen::JacobiSVD<geometry::Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  geometry::Mat3 s = geometry::Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) s(2, 2) = -1.0;
  const geometry::Mat3 r = svd.matrixU() * s * svd.matrixV().transpose();
  const geometry::Vec3 t = mu_g - r * mu_e;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (r * p_est[i] + t - p_gt[i]).squaredNorm();
  AteResult out;
  out.rmse = std::sqrt(ss / static_cast<double>(n));
  out.matched = static_cast<int>(n);
  out.alignment = geometry::SE3Pose(Eigen::Quaterniond(r), t);
  return out;
}

}  // namespace blursplat::pipeline
