#include "blursplat/mapping/losses.hpp"

#include <cmath>

#include "blursplat/error.hpp"

namespace blursplat::mapping {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Mean absolute error over valid pixels and all channels; the adjoint of
// weight * L1 is accumulated into `adj`.
double l1_color(const Image& pred, const Image& obs, const Image& valid, double weight, Image& adj) {
  std::size_t count = 0;
  for (double v : valid.data()) count += v > 0.5 ? 1 : 0;
  if (count == 0) return 0.0;
  const int ch = pred.channels();
  const double norm = 1.0 / (static_cast<double>(count) * ch);
  double sum = 0.0;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!(valid.at(x, y) > 0.5)) continue;
      for (int c = 0; c < ch; ++c) {
        const double r = pred.at(x, y, c) - obs.at(x, y, c);
        sum += std::abs(r);
        adj.at(x, y, c) += weight * norm * sign(r);
      }
    }
  }
  return sum * norm;
}

// Depth L1 over pixels with observed depth and a well-covered render.
double l1_depth(const Image& pred, const Image& obs, const Image& alpha, double weight, Image& adj) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < obs.size(); ++i)
    count += (obs.data()[i] > 0.0 && alpha.data()[i] >= kDepthAlphaMin) ? 1 : 0;
  if (count == 0) return 0.0;
  const double norm = 1.0 / static_cast<double>(count);
  double sum = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!(obs.data()[i] > 0.0 && alpha.data()[i] >= kDepthAlphaMin)) continue;
    const double r = pred.data()[i] - obs.data()[i];
    sum += std::abs(r);
    adj.data()[i] += weight * norm * sign(r);
  }
  return sum * norm;
}

void require_class(const FrameRecord& fr, FrameClass expected, const char* loss) {
  if (fr.frame_class != expected)
    throw ContractError(std::string(loss) + " called on a " + detect::to_string(fr.frame_class) +
                        " frame");
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {lambda_rgb, lambda_depth, lambda_sparse, lambda_reg, w_sharp, w_deblur, w_fail}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and >= 0");
  }
}

double LossWeights::class_weight(FrameClass c) const {
  switch (c) {
    case FrameClass::Sharp: return w_sharp;
    case FrameClass::Deblurred: return w_deblur;
    case FrameClass::Fail: return w_fail;
  }
  return 0.0;
}

void FrameGradient::scale_by(double s) {
  exposure.a *= s;
  exposure.b *= s;
  for (auto& p : proposals) {
    for (double& v : p.kernel_logits) v *= s;
    for (double& v : p.mask_logits) v *= s;
    for (double& v : p.alpha_logits) v *= s;
  }
  for (Vec6& c : corrections) c *= s;
  start *= s;
  end *= s;
}

LossResult loss_sharp(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                      const LossWeights& lw, const LossOptions& opt) {
  require_class(fr, FrameClass::Sharp, "loss_sharp");
  const ScaledObservation obs = observe(fr, cam, opt.factor);
  const scene::RenderOutput r = scene::render(scene, obs.cam, fr.pose);
  Image color_adj = Image::like(r.color);
  Image depth_adj = Image::like(r.depth);
  LossResult out;
  out.value = lw.w_sharp * (lw.lambda_rgb * l1_color(r.color, obs.color, obs.color_valid,
                                                     lw.w_sharp * lw.lambda_rgb, color_adj) +
                            lw.lambda_depth * l1_depth(r.depth, obs.depth, r.alpha,
                                                       lw.w_sharp * lw.lambda_depth, depth_adj));
  out.scene = scene::render_gradients(scene, obs.cam, fr.pose, color_adj, depth_adj).gaussians;
  return out;
}

LossResult loss_deblur(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                       const LossWeights& lw, const LossOptions& opt) {
  require_class(fr, FrameClass::Deblurred, "loss_deblur");
  const ScaledObservation obs = observe(fr, cam, opt.factor);
  const LevelParams& lp = fr.level(opt.factor);
  const BlurProposal& bp = lp.proposals.at(0);
  const blur::ProcessedView view =
      blur::process_view(scene, obs.cam, fr.pose, bp, lp.exposure, opt.gate_by_alpha);
  const Image* gate = view.gate.empty() ? nullptr : &view.gate;

  Image color_adj = Image::like(view.color);
  Image depth_adj = Image::like(view.depth);
  LossResult out;
  out.value = lw.lambda_rgb * l1_color(view.color, obs.color, obs.color_valid, lw.lambda_rgb, color_adj) +
              lw.lambda_depth * l1_depth(view.depth, obs.depth, view.render.alpha, lw.lambda_depth, depth_adj) +
              lw.lambda_sparse * blur::mean_mask(bp, gate);

  blur::ViewGradients vg = blur::process_view_backward(scene, obs.cam, fr.pose, bp, lp.exposure,
                                                       view, color_adj, depth_adj);
  blur::mean_mask_backward(bp, gate, lw.lambda_sparse, vg.proposal);
  out.scene = std::move(vg.render.gaussians);
  out.frame.exposure = vg.exposure;
  out.frame.proposals.push_back(std::move(vg.proposal));
  return out;
}

LossResult loss_fail(const FrameRecord& fr, const Scene& scene, const Camera& cam,
                     const LossWeights& lw, const LossOptions& opt) {
  require_class(fr, FrameClass::Fail, "loss_fail");
  fr.validate();
  const ScaledObservation obs = observe(fr, cam, opt.factor);
  const LevelParams& lp = fr.level(opt.factor);
  const VirtualTrajectory& vt = *fr.trajectory;
  const blur::SubframeBlur sub =
      blur::compose_subframe_blur(scene, obs.cam, vt, lp.proposals, lp.exposure, opt.gate_by_alpha);

  Image mean_alpha(obs.cam.width, obs.cam.height, 1);
  for (const blur::ProcessedView& v : sub.views) {
    for (std::size_t i = 0; i < mean_alpha.size(); ++i)
      mean_alpha.data()[i] += v.render.alpha.data()[i] / vt.n_sub;
  }

  Image color_adj = Image::like(sub.color);
  Image depth_adj = Image::like(sub.depth);
  LossResult out;
  out.value = lw.lambda_rgb * l1_color(sub.color, obs.color, obs.color_valid, lw.lambda_rgb, color_adj) +
              lw.lambda_depth * l1_depth(sub.depth, obs.depth, mean_alpha, lw.lambda_depth, depth_adj);
  for (int k = 0; k < vt.n_sub; ++k) {
    const Image* gate = sub.views[k].gate.empty() ? nullptr : &sub.views[k].gate;
    out.value += lw.lambda_sparse * blur::mean_mask(lp.proposals[k], gate) / vt.n_sub;
  }

  blur::SubframeGradients sg = blur::compose_subframe_blur_backward(
      scene, obs.cam, vt, lp.proposals, lp.exposure, sub, color_adj, depth_adj);
  for (int k = 0; k < vt.n_sub; ++k) {
    const Image* gate = sub.views[k].gate.empty() ? nullptr : &sub.views[k].gate;
    blur::mean_mask_backward(lp.proposals[k], gate, lw.lambda_sparse / vt.n_sub, sg.proposals[k]);
  }
  out.scene = std::move(sg.scene);
  out.frame.exposure = sg.exposure;
  out.frame.proposals = std::move(sg.proposals);
  out.frame.corrections = std::move(sg.corrections);
  out.frame.start = sg.start;
  out.frame.end = sg.end;
  return out;
}

TotalLoss loss_total(const std::vector<FrameRecord>& frames, const Scene& scene, const Camera& cam,
                     const LossWeights& lw, const LossOptions& opt) {
  TotalLoss total;
  total.scene.resize(scene.size());
  total.frames.resize(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const FrameRecord& fr = frames[f];
    LossResult r;
    double w = 1.0;
    switch (fr.frame_class) {
      case FrameClass::Sharp:
        r = loss_sharp(fr, scene, cam, lw, opt);
        total.sharp += r.value;
        break;
      case FrameClass::Deblurred:
        w = lw.w_deblur;
        r = loss_deblur(fr, scene, cam, lw, opt);
        total.deblurred += w * r.value;
        break;
      case FrameClass::Fail:
        w = lw.w_fail;
        r = loss_fail(fr, scene, cam, lw, opt);
        total.fail += w * r.value;
        break;
    }
    total.value += w * r.value;
    blur::accumulate(total.scene, r.scene, w);
    r.frame.scale_by(w);
    total.frames[f] = std::move(r.frame);
  }
  return total;
}

double scale_spread(const Scene& scene) {
  if (scene.empty()) return 0.0;
  Vec3 mean = Vec3::Zero();
  for (const auto& g : scene) mean += g.scale;
  mean /= static_cast<double>(scene.size());
  double spread = 0.0;
  for (const auto& g : scene) spread += (g.scale - mean).cwiseAbs().sum();
  return spread;
}

TotalLoss loss_global(const std::vector<FrameRecord>& frames, const Scene& scene, const Camera& cam,
                      const LossWeights& lw, const LossOptions& opt) {
  TotalLoss total = loss_total(frames, scene, cam, lw, opt);
  if (scene.empty()) return total;
  Vec3 mean = Vec3::Zero();
  for (const auto& g : scene) mean += g.scale;
  mean /= static_cast<double>(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    for (int k = 0; k < 3; ++k) total.scene[i].scale(k) += lw.lambda_reg * sign(scene[i].scale(k) - mean(k));
  }
  total.regularizer = lw.lambda_reg * scale_spread(scene);
  total.value += total.regularizer;
  return total;
}

}  // namespace blursplat::mapping
