#include "blursplat/blur/subframe.hpp"

#include "blursplat/error.hpp"

namespace blursplat::blur {

Image alpha_gate(const Image& alpha) {
  Image g = Image::like(alpha);
  const auto a = alpha.data();
  auto o = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] >= kUnderReconstructedAlpha ? 1.0 : 0.0;
  return g;
}

ProcessedView process_view(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                           const BlurProposal& bp, const ExposureParams& e, bool gate_by_alpha) {
  ProcessedView v;
  v.render = scene::render(scene, cam, pose);
  v.exposed = apply_exposure(v.render.color, e);
  if (gate_by_alpha) v.gate = alpha_gate(v.render.alpha);
  const Image* gate = gate_by_alpha ? &v.gate : nullptr;
  v.color = apply_blur_proposal(v.exposed, v.render.depth, bp, gate);
  v.depth = apply_blur_proposal(v.render.depth, v.render.depth, bp, gate);
  return v;
}

ViewGradients process_view_backward(const Scene& scene, const Camera& cam, const SE3Pose& pose,
                                    const BlurProposal& bp, const ExposureParams& e,
                                    const ProcessedView& view, const Image& color_adjoint,
                                    const Image& depth_adjoint) {
  ViewGradients g;
  g.proposal = BlurProposalGradient(bp);
  const Image* gate = view.gate.empty() ? nullptr : &view.gate;
  Image exposed_adj = Image::like(view.exposed);
  Image depth_adj = Image::like(view.render.depth);
  apply_blur_proposal_backward(view.exposed, view.render.depth, bp, gate, color_adjoint,
                               &exposed_adj, &depth_adj, g.proposal);
  apply_blur_proposal_backward(view.render.depth, view.render.depth, bp, gate, depth_adjoint,
                               &depth_adj, &depth_adj, g.proposal);
  Image color_adj = Image::like(view.render.color);
  g.exposure = apply_exposure_backward(view.render.color, e, exposed_adj, &color_adj);
  g.render = scene::render_gradients(scene, cam, pose, color_adj, depth_adj);
  return g;
}

SubframeBlur compose_subframe_blur(const Scene& scene, const Camera& cam,
                                   const VirtualTrajectory& vt,
                                   const std::vector<BlurProposal>& bps, const ExposureParams& e,
                                   bool gate_by_alpha) {
  vt.validate();
  if (bps.size() != static_cast<std::size_t>(vt.n_sub))
    throw ContractError("one blur proposal per sub-frame is required");
  SubframeBlur out;
  out.poses = interpolate_subframe_poses(vt);
  out.color = Image(cam.width, cam.height, 3);
  out.depth = Image(cam.width, cam.height, 1);
  const double w = 1.0 / vt.n_sub;
  for (int k = 0; k < vt.n_sub; ++k) {
    out.views.push_back(process_view(scene, cam, out.poses[k], bps[k], e, gate_by_alpha));
    const ProcessedView& v = out.views.back();
    for (std::size_t i = 0; i < out.color.size(); ++i) out.color.data()[i] += w * v.color.data()[i];
    for (std::size_t i = 0; i < out.depth.size(); ++i) out.depth.data()[i] += w * v.depth.data()[i];
  }
  return out;
}

void accumulate(std::vector<scene::GaussianGradient>& dst,
                const std::vector<scene::GaussianGradient>& src, double scale) {
  if (dst.empty()) dst.resize(src.size());
  if (dst.size() != src.size()) throw ContractError("gradient size mismatch");
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i].mean += scale * src[i].mean;
    dst[i].rotation += scale * src[i].rotation;
    dst[i].scale += scale * src[i].scale;
    dst[i].opacity += scale * src[i].opacity;
    dst[i].color += scale * src[i].color;
  }
}

SubframeGradients compose_subframe_blur_backward(const Scene& scene, const Camera& cam,
                                                 const VirtualTrajectory& vt,
                                                 const std::vector<BlurProposal>& bps,
                                                 const ExposureParams& e, const SubframeBlur& fwd,
                                                 const Image& color_adjoint,
                                                 const Image& depth_adjoint) {
  SubframeGradients g;
  g.scene.resize(scene.size());
  g.corrections.assign(static_cast<std::size_t>(vt.n_sub), Vec6::Zero());
  const double w = 1.0 / vt.n_sub;
  Image ca = color_adjoint;
  Image da = depth_adjoint;
  for (double& v : ca.data()) v *= w;
  for (double& v : da.data()) v *= w;
  for (int k = 0; k < vt.n_sub; ++k) {
    const ViewGradients vg =
        process_view_backward(scene, cam, fwd.poses[k], bps[k], e, fwd.views[k], ca, da);
    accumulate(g.scene, vg.render.gaussians);
    g.exposure.a += vg.exposure.a;
    g.exposure.b += vg.exposure.b;
    g.proposals.push_back(vg.proposal);
    const Eigen::Matrix<double, 18, 1> chained = subframe_pose_jacobian(vt, k).transpose() * vg.render.pose;
    g.start += chained.segment<6>(0);
    g.end += chained.segment<6>(6);
    g.corrections[k] = chained.segment<6>(12);
  }
  return g;
}

}  // namespace blursplat::blur
