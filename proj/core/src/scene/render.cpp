#include "blursplat/scene/render.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/AutoDiff>

#include "blursplat/error.hpp"
#include "blursplat/scene/projection.hpp"

namespace blursplat::scene {
namespace {

struct Splat {
  int index = 0;
  double u = 0, v = 0;
  double a = 0, b = 0, c = 0;
  double depth = 0;
  double opacity = 0;
  Vec3 color = Vec3::Zero();
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
};

struct Contribution {
  int splat = 0;
  double alpha = 0;
  double gauss = 0;
  double transmittance = 0;  // before this splat
  bool clamped = false;
};

class Rasterizer {
 public:
  Rasterizer(const Scene& scene, const Camera& cam, const SE3Pose& pose) : cam_(cam) {
    cam.validate();
    const geometry::RigidT<double> rigid = pose.rigid();
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const Gaussian3D& g = scene[i];
      if (!(pose.to_camera(g.mean).z() > kNearPlane)) continue;
      const auto p = detail::project_generic<double>(g.mean, g.rotation, g.scale, rigid, cam);
      Splat s;
      s.index = static_cast<int>(i);
      s.u = p.u;
      s.v = p.v;
      s.a = p.conic_a;
      s.b = p.conic_b;
      s.c = p.conic_c;
      s.depth = p.depth;
      s.opacity = g.opacity;
      s.color = g.color;
      const double tr = p.cov00 + p.cov11;
      const double det = p.cov00 * p.cov11 - p.cov01 * p.cov01;
      const double lambda = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
      const double radius = std::sqrt(-2.0 * kPowerCutoff * lambda);
      if (!std::isfinite(s.u) || !std::isfinite(s.v) || !std::isfinite(radius)) continue;
      s.x0 = std::max(0, static_cast<int>(std::floor(s.u - radius)));
      s.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(s.u + radius)));
      s.y0 = std::max(0, static_cast<int>(std::floor(s.v - radius)));
      s.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(s.v + radius)));
      if (s.x0 > s.x1 || s.y0 > s.y1) continue;
      splats_.push_back(s);
    }
    std::stable_sort(splats_.begin(), splats_.end(), [](const Splat& l, const Splat& r) {
      return l.depth < r.depth || (l.depth == r.depth && l.index < r.index);
    });
    rows_.resize(static_cast<std::size_t>(cam.height));
    for (std::size_t k = 0; k < splats_.size(); ++k) {
      for (int y = splats_[k].y0; y <= splats_[k].y1; ++y) rows_[y].push_back(static_cast<int>(k));
    }
  }

  const std::vector<Splat>& splats() const { return splats_; }

  /// Composites pixel (x, y); returns the final transmittance.
  double composite(int x, int y, std::vector<Contribution>& out) const {
    out.clear();
    double t = 1.0;
    for (int k : rows_[y]) {
      const Splat& s = splats_[k];
      if (x < s.x0 || x > s.x1) continue;
      const double dx = x - s.u;
      const double dy = y - s.v;
      const double power = -0.5 * (s.a * dx * dx + 2.0 * s.b * dx * dy + s.c * dy * dy);
      if (power < kPowerCutoff) continue;
      const double gauss = std::exp(power);
      double alpha = s.opacity * gauss;
      const bool clamped = alpha > kAlphaMax;
      if (clamped) alpha = kAlphaMax;
      out.push_back({k, alpha, gauss, t, clamped});
      t *= 1.0 - alpha;
      if (t < kTransmittanceMin) break;
    }
    return t;
  }

 private:
  Camera cam_;
  std::vector<Splat> splats_;
  std::vector<std::vector<int>> rows_;
};

constexpr int kJetDims = 16;
using Jet = Eigen::AutoDiffScalar<Eigen::Matrix<double, kJetDims, 1>>;

Jet seed(double value, int dir) {
  return Jet(value, kJetDims, dir);
}

}  // namespace

RenderOutput render(const Scene& scene, const Camera& cam, const SE3Pose& pose) {
  const Rasterizer rast(scene, cam, pose);
  RenderOutput out{Image(cam.width, cam.height, 3), Image(cam.width, cam.height, 1),
                   Image(cam.width, cam.height, 1)};
  std::vector<Contribution> contribs;
  const auto& splats = rast.splats();
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const double t_final = rast.composite(x, y, contribs);
      Vec3 color = Vec3::Zero();
      double depth = 0.0;
      for (const Contribution& ct : contribs) {
        const Splat& s = splats[ct.splat];
        const double w = ct.alpha * ct.transmittance;
        color += w * s.color;
        depth += w * s.depth;
      }
      for (int c = 0; c < 3; ++c) out.color.at(x, y, c) = color(c);
      out.depth.at(x, y) = depth;
      out.alpha.at(x, y) = 1.0 - t_final;
    }
  }
  return out;
}

RenderGradients render_gradients(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                                 const Image& color_adjoint, const Image& depth_adjoint) {
  if (color_adjoint.width() != cam.width || color_adjoint.height() != cam.height ||
      color_adjoint.channels() != 3 || depth_adjoint.width() != cam.width ||
      depth_adjoint.height() != cam.height || depth_adjoint.channels() != 1)
    throw ContractError("render adjoints must match the camera size");
  const Rasterizer rast(scene, cam, pose);
  const auto& splats = rast.splats();

  // Adjoints of the projected quantities, per sorted splat:
  // u, v, conic a, b, c, depth.
  std::vector<Eigen::Matrix<double, 6, 1>> g_proj(splats.size(), Eigen::Matrix<double, 6, 1>::Zero());
  std::vector<double> g_opacity(splats.size(), 0.0);
  std::vector<Vec3> g_color(splats.size(), Vec3::Zero());

  std::vector<Contribution> contribs;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const Vec3 gc(color_adjoint.at(x, y, 0), color_adjoint.at(x, y, 1), color_adjoint.at(x, y, 2));
      const double gd = depth_adjoint.at(x, y);
      if (gc.isZero(0.0) && gd == 0.0) continue;
      rast.composite(x, y, contribs);
      Vec3 accum_c = Vec3::Zero();
      double accum_d = 0.0;
      for (auto it = contribs.rbegin(); it != contribs.rend(); ++it) {
        const Splat& s = splats[it->splat];
        const double w = it->alpha * it->transmittance;
        g_color[it->splat] += w * gc;
        g_proj[it->splat](5) += w * gd;
        const double g_alpha =
            it->transmittance * ((s.color - accum_c).dot(gc) + (s.depth - accum_d) * gd);
        accum_c = it->alpha * s.color + (1.0 - it->alpha) * accum_c;
        accum_d = it->alpha * s.depth + (1.0 - it->alpha) * accum_d;
        if (it->clamped) continue;
        g_opacity[it->splat] += g_alpha * it->gauss;
        const double g_power = g_alpha * it->alpha;
        const double dx = x - s.u;
        const double dy = y - s.v;
        auto& gp = g_proj[it->splat];
        gp(0) += g_power * (s.a * dx + s.b * dy);
        gp(1) += g_power * (s.b * dx + s.c * dy);
        gp(2) += g_power * (-0.5 * dx * dx);
        gp(3) += g_power * (-dx * dy);
        gp(4) += g_power * (-0.5 * dy * dy);
      }
    }
  }

  RenderGradients out;
  out.gaussians.resize(scene.size());
  const geometry::RigidT<double> base = pose.rigid();
  geometry::RigidT<Jet> base_jet;
  base_jet.q = base.q.cast<Jet>();
  base_jet.t = base.t.cast<Jet>();
  for (std::size_t k = 0; k < splats.size(); ++k) {
    const Splat& s = splats[k];
    GaussianGradient& gg = out.gaussians[static_cast<std::size_t>(s.index)];
    gg.color = g_color[k];
    gg.opacity = g_opacity[k];
    if (g_proj[k].isZero(0.0)) continue;

    const Gaussian3D& g = scene[static_cast<std::size_t>(s.index)];
    geometry::Vec3T<Jet> mean, scale;
    geometry::Vec4T<Jet> quat;
    geometry::Vec6T<Jet> xi;
    for (int i = 0; i < 3; ++i) mean(i) = seed(g.mean(i), i);
    for (int i = 0; i < 4; ++i) quat(i) = seed(g.rotation(i), 3 + i);
    for (int i = 0; i < 3; ++i) scale(i) = seed(g.scale(i), 7 + i);
    for (int i = 0; i < 6; ++i) xi(i) = seed(0.0, 10 + i);
    const geometry::RigidT<Jet> cam_pose = base_jet * geometry::se3_exp<Jet>(xi);
    const auto p = detail::project_generic<Jet>(mean, quat, scale, cam_pose, cam);

    const auto& gp = g_proj[k];
    const Eigen::Matrix<double, kJetDims, 1> total =
        gp(0) * p.u.derivatives() + gp(1) * p.v.derivatives() + gp(2) * p.conic_a.derivatives() +
        gp(3) * p.conic_b.derivatives() + gp(4) * p.conic_c.derivatives() +
        gp(5) * p.depth.derivatives();
    gg.mean = total.segment<3>(0);
    gg.rotation = total.segment<4>(3);
    gg.scale = total.segment<3>(7);
    out.pose += total.segment<6>(10);
  }
  return out;
}

}  // namespace blursplat::scene
