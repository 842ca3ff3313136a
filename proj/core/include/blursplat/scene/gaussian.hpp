#pragma once

#include <Eigen/Core>
#include <vector>

#include "blursplat/geometry/se3.hpp"
#include "blursplat/imaging/image.hpp"

namespace blursplat::scene {

using geometry::Mat3;
using geometry::SE3Pose;
using geometry::Vec3;
using geometry::Vec4;
using imaging::Image;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Gaussian3D {
  Vec3 mean = Vec3::Zero();
  Vec4 rotation = Vec4(1, 0, 0, 0);  // (w, x, y, z)
  Vec3 scale = Vec3::Ones();
  double opacity = 1.0;
  Vec3 color = Vec3::Zero();  // linear RGB

  /// R diag(scale^2) R^T with R from the normalized quaternion.
  Mat3 covariance() const;
  /// Throws ContractError on non-positive scale, opacity outside [0, 1],
  /// negative color or a zero quaternion.
  void validate() const;
};

using Scene = std::vector<Gaussian3D>;

/// Pinhole intrinsics. Pixel (x, y) samples the image plane at integer
/// coordinates, so a principal point of (w - 1) / 2 is the image centre.
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  /// Intrinsics matching imaging::downscale(img, factor).
  Camera scaled(int factor) const;
  Vec2 project(const Vec3& camera_point) const;
  /// Camera-frame point at pixel (x, y) with depth z.
  Vec3 back_project(double x, double y, double z) const;
};

/// exp(-0.5 (x - mu)^T Sigma^-1 (x - mu)). Throws NumericalError when a scale
/// is below 1e-9.
double eval_gaussian(const Gaussian3D& g, const Vec3& x);

inline constexpr double kNearPlane = 0.01;
inline constexpr double kCovarianceFloor = 0.3;

struct Projection {
  bool visible = false;  // false when the mean is at or behind the near plane
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();
  double depth = 0.0;
};

/// EWA projection: cov2d = J W Sigma W^T J^T + 0.3 I.
Projection project_gaussian(const Gaussian3D& g, const Camera& cam, const SE3Pose& pose);

/// One Gaussian per valid pixel on a stride grid starting at (offset, offset).
/// When `where` is given, only pixels with where(x, y) > 0.5 are seeded.
std::vector<Gaussian3D> seed_gaussians_from_depth(const Image& img, const Image& depth,
                                                  const Camera& cam, const SE3Pose& pose,
                                                  int stride, int offset = 0,
                                                  const Image* where = nullptr);

}  // namespace blursplat::scene
