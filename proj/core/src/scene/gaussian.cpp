#include "blursplat/scene/gaussian.hpp"

#include <cmath>

#include "blursplat/error.hpp"
#include "blursplat/scene/projection.hpp"

namespace blursplat::scene {

Mat3 Gaussian3D::covariance() const {
  const Mat3 r = geometry::quat_to_rotation<double>(rotation);
  return r * scale.cwiseAbs2().asDiagonal() * r.transpose();
}

void Gaussian3D::validate() const {
  if (!(scale.minCoeff() > 0.0) || !scale.allFinite())
    throw ContractError("Gaussian scales must be positive and finite");
  if (!(opacity >= 0.0 && opacity <= 1.0)) throw ContractError("Gaussian opacity must lie in [0, 1]");
  if (!(color.minCoeff() >= 0.0) || !color.allFinite())
    throw ContractError("Gaussian color must be non-negative and finite");
  if (!(rotation.norm() > 0.0) || !mean.allFinite())
    throw ContractError("Gaussian rotation must be non-zero and the mean finite");
}

void Camera::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw ContractError("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ContractError("camera size must be positive");
  if (!(cx >= -0.5 && cx <= width - 0.5 && cy >= -0.5 && cy <= height - 0.5))
    throw ContractError("camera principal point lies outside the image");
}

Camera Camera::scaled(int factor) const {
  if (factor < 1) throw ContractError("camera scale factor must be >= 1");
  Camera c = *this;
  const double f = factor;
  c.fx = fx / f;
  c.fy = fy / f;
  c.cx = (cx - (f - 1.0) / 2.0) / f;
  c.cy = (cy - (f - 1.0) / 2.0) / f;
  c.width = (width + factor - 1) / factor;
  c.height = (height + factor - 1) / factor;
  return c;
}

Vec2 Camera::project(const Vec3& p) const {
  return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

Vec3 Camera::back_project(double x, double y, double z) const {
  return {(x - cx) / fx * z, (y - cy) / fy * z, z};
}

double eval_gaussian(const Gaussian3D& g, const Vec3& x) {
  if (!(g.scale.minCoeff() >= 1e-9)) throw NumericalError("Gaussian covariance is singular");
  const Mat3 r = geometry::quat_to_rotation<double>(g.rotation);
  // Sigma^-1 = R diag(1/s^2) R^T
  const Vec3 local = (r.transpose() * (x - g.mean)).cwiseQuotient(g.scale);
  return std::exp(-0.5 * local.squaredNorm());
}

Projection project_gaussian(const Gaussian3D& g, const Camera& cam, const SE3Pose& pose) {
  Projection p;
  const Vec3 pc = pose.to_camera(g.mean);
  if (!(pc.z() > kNearPlane)) return p;
  const auto pr = detail::project_generic<double>(g.mean, g.rotation, g.scale, pose.rigid(), cam);
  p.visible = true;
  p.mean2d = {pr.u, pr.v};
  p.cov2d << pr.cov00, pr.cov01, pr.cov01, pr.cov11;
  p.depth = pr.depth;
  return p;
}

std::vector<Gaussian3D> seed_gaussians_from_depth(const Image& img, const Image& depth,
                                                  const Camera& cam, const SE3Pose& pose,
                                                  int stride, int offset, const Image* where) {
  if (stride < 1) throw ContractError("seeding stride must be >= 1");
  if (!img.same_size(depth) || depth.channels() != 1 || img.width() != cam.width ||
      img.height() != cam.height)
    throw ContractError("seeding inputs must match the camera size");
  std::vector<Gaussian3D> out;
  for (int y = offset % stride; y < img.height(); y += stride) {
    for (int x = offset % stride; x < img.width(); x += stride) {
      const double d = depth.at(x, y);
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      if (where != nullptr && !(where->at(x, y) > 0.5)) continue;
      Gaussian3D g;
      g.mean = pose * cam.back_project(x, y, d);
      g.scale = Vec3::Constant(d / cam.fx * stride / 2.0);
      g.opacity = 0.7;
      for (int c = 0; c < 3; ++c) g.color(c) = std::max(0.0, img.at(x, y, img.channels() == 3 ? c : 0));
      out.push_back(g);
    }
  }
  return out;
}

}  // namespace blursplat::scene
