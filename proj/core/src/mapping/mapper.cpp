#include "blursplat/mapping/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "blursplat/error.hpp"
#include "blursplat/mapping/adam.hpp"
#include "blursplat/scene/deform.hpp"

namespace blursplat::mapping {
namespace {

constexpr double kOpacityEps = 1e-6;

double logit(double p) {
  p = std::clamp(p, kOpacityEps, 1.0 - kOpacityEps);
  return std::log(p / (1.0 - p));
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Unconstrained copy of the scene parameters.
struct SceneParams {
  std::vector<double> means, log_scales, rotations, opacity_logits, colors;

  explicit SceneParams(const Scene& scene) {
    for (const auto& g : scene) {
      for (int k = 0; k < 3; ++k) {
        means.push_back(g.mean(k));
        log_scales.push_back(std::log(g.scale(k)));
        colors.push_back(g.color(k));
      }
      for (int k = 0; k < 4; ++k) rotations.push_back(g.rotation(k));
      opacity_logits.push_back(logit(g.opacity));
    }
    remember();
  }

  // Only parameters whose unconstrained value moved are mapped back, so a
  // zero step leaves the scene bit-identical (the logit and log round trips
  // are not exact).
  void write(Scene& scene) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
      auto& g = scene[i];
      if (!std::equal(&rotations[4 * i], &rotations[4 * i] + 4, &last_rotations[4 * i])) {
        geometry::Vec4 q(rotations[4 * i], rotations[4 * i + 1], rotations[4 * i + 2], rotations[4 * i + 3]);
        q.normalize();
        for (int k = 0; k < 4; ++k) rotations[4 * i + k] = q(k);
        g.rotation = q;
      }
      for (int k = 0; k < 3; ++k) {
        colors[3 * i + k] = std::max(0.0, colors[3 * i + k]);
        g.mean(k) = means[3 * i + k];
        g.color(k) = colors[3 * i + k];
        if (log_scales[3 * i + k] != last_log_scales[3 * i + k]) g.scale(k) = std::exp(log_scales[3 * i + k]);
      }
      if (opacity_logits[i] != last_opacity_logits[i]) g.opacity = sigmoid(opacity_logits[i]);
    }
    remember();
  }

 private:
  std::vector<double> last_log_scales, last_rotations, last_opacity_logits;

  void remember() {
    last_log_scales = log_scales;
    last_rotations = rotations;
    last_opacity_logits = opacity_logits;
  }
};

struct SceneGrads {
  std::vector<double> means, log_scales, rotations, opacity_logits, colors;

  SceneGrads(const Scene& scene, const std::vector<scene::GaussianGradient>& g) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        means.push_back(g[i].mean(k));
        log_scales.push_back(g[i].scale(k) * scene[i].scale(k));
        colors.push_back(g[i].color(k));
      }
      for (int k = 0; k < 4; ++k) rotations.push_back(g[i].rotation(k));
      const double o = scene[i].opacity;
      opacity_logits.push_back(g[i].opacity * o * (1.0 - o));
    }
  }
};

std::vector<double> pack(const BlurProposal& bp) {
  std::vector<double> v(bp.kernel_logits);
  v.insert(v.end(), bp.mask_logits.begin(), bp.mask_logits.end());
  v.insert(v.end(), bp.alpha_logits.begin(), bp.alpha_logits.end());
  return v;
}

std::vector<double> pack(const blur::BlurProposalGradient& g) {
  std::vector<double> v(g.kernel_logits);
  v.insert(v.end(), g.mask_logits.begin(), g.mask_logits.end());
  v.insert(v.end(), g.alpha_logits.begin(), g.alpha_logits.end());
  return v;
}

void unpack(const std::vector<double>& v, BlurProposal& bp) {
  auto it = v.begin();
  std::copy_n(it, bp.kernel_logits.size(), bp.kernel_logits.begin());
  it += static_cast<std::ptrdiff_t>(bp.kernel_logits.size());
  std::copy_n(it, bp.mask_logits.size(), bp.mask_logits.begin());
  it += static_cast<std::ptrdiff_t>(bp.mask_logits.size());
  std::copy_n(it, bp.alpha_logits.size(), bp.alpha_logits.begin());
}

// Optimizer state of one frame at one level.
struct FrameOptimizer {
  std::unique_ptr<Adam> exposure;
  std::vector<Adam> proposals;
  std::unique_ptr<Adam> corrections;
  std::unique_ptr<Adam> endpoints;
};

void check_finite(const TotalLoss& loss, int iteration, int factor) {
  if (std::isfinite(loss.value)) return;
  std::ostringstream os;
  os << "non-finite loss at iteration " << iteration << ", scale 1/" << factor
     << ": sharp=" << loss.sharp << " deblurred=" << loss.deblurred << " fail=" << loss.fail
     << " regularizer=" << loss.regularizer;
  throw NumericalError(os.str());
}

void run_level(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
               const LossWeights& lw, const ScaleLevel& level, const MappingOptions& opt,
               int& iteration, std::vector<LossTraceRow>& trace) {
  for (FrameRecord& fr : frames) fr.prepare_level(level, cam);

  const LearningRates& lr = opt.lr;
  Adam a_means(lr.means), a_scales(lr.log_scales), a_rot(lr.rotations),
      a_opacity(lr.opacity_logits), a_colors(lr.colors);
  std::vector<FrameOptimizer> fopt(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const FrameRecord& fr = frames[f];
    if (fr.frame_class == FrameClass::Sharp) continue;
    fopt[f].exposure = std::make_unique<Adam>(lr.exposure);
    for (std::size_t k = 0; k < fr.level(level.factor).proposals.size(); ++k)
      fopt[f].proposals.emplace_back(lr.proposals);
    if (fr.frame_class == FrameClass::Fail) {
      fopt[f].corrections = std::make_unique<Adam>(lr.corrections);
      fopt[f].endpoints = std::make_unique<Adam>(lr.endpoints);
    }
  }

  LossOptions lopt;
  lopt.factor = level.factor;
  lopt.gate_by_alpha = opt.gate_by_alpha;
  SceneParams params(scene);
  for (int it = 0; it < level.iterations; ++it, ++iteration) {
    const TotalLoss loss = opt.global_loss ? loss_global(frames, scene, cam, lw, lopt)
                                           : loss_total(frames, scene, cam, lw, lopt);
    check_finite(loss, iteration, level.factor);
    trace.push_back({iteration, level.factor, loss.sharp, loss.deblurred, loss.fail,
                     loss.regularizer, loss.value});

    if (!scene.empty()) {
      SceneGrads g(scene, loss.scene);
      a_means.step(params.means, g.means);
      a_scales.step(params.log_scales, g.log_scales);
      a_rot.step(params.rotations, g.rotations);
      a_opacity.step(params.opacity_logits, g.opacity_logits);
      a_colors.step(params.colors, g.colors);
      params.write(scene);
    }

    for (std::size_t f = 0; f < frames.size(); ++f) {
      FrameRecord& fr = frames[f];
      if (fr.frame_class == FrameClass::Sharp) continue;
      const FrameGradient& fg = loss.frames[f];
      LevelParams& lp = fr.levels.at(level.factor);
      if (opt.optimize_exposure) {
        std::vector<double> e{lp.exposure.a, lp.exposure.b};
        const std::vector<double> ge{fg.exposure.a, fg.exposure.b};
        fopt[f].exposure->step(e, ge);
        lp.exposure = {e[0], e[1]};
      }
      for (std::size_t k = 0; k < lp.proposals.size(); ++k) {
        std::vector<double> p = pack(lp.proposals[k]);
        fopt[f].proposals[k].step(p, pack(fg.proposals[k]));
        unpack(p, lp.proposals[k]);
      }
      if (fr.frame_class != FrameClass::Fail) continue;
      VirtualTrajectory& vt = *fr.trajectory;
      if (opt.optimize_corrections) {
        std::vector<double> c, gc;
        for (int k = 0; k < vt.n_sub; ++k) {
          for (int i = 0; i < 6; ++i) {
            c.push_back(vt.corrections[k](i));
            gc.push_back(fg.corrections[k](i));
          }
        }
        fopt[f].corrections->step(c, gc);
        for (int k = 0; k < vt.n_sub; ++k) {
          for (int i = 0; i < 6; ++i) vt.corrections[k](i) = c[6 * k + i];
        }
      }
      if (opt.optimize_endpoints) {
        // Adam on a local chart: the step is taken from zero and applied as
        // a right perturbation of each endpoint.
        std::vector<double> d(12, 0.0), gd(12);
        for (int i = 0; i < 6; ++i) {
          gd[i] = fg.start(i);
          gd[6 + i] = fg.end(i);
        }
        fopt[f].endpoints->step(d, gd);
        vt.start = vt.start * SE3Pose::exp(Eigen::Map<const Vec6>(d.data()));
        vt.end = vt.end * SE3Pose::exp(Eigen::Map<const Vec6>(d.data() + 6));
      }
    }
  }
}

}  // namespace

MappingResult run_mapping(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                          const LossWeights& lw, const std::vector<ScaleLevel>& schedule,
                          const MappingOptions& opt) {
  if (frames.empty()) throw ContractError("run_mapping needs at least one frame");
  lw.validate();
  cam.validate();
  for (const FrameRecord& fr : frames) fr.validate();
  MappingResult result;
  int iteration = opt.iteration_offset;
  for (const ScaleLevel& level : schedule) {
    if (level.factor < 1 || level.kernel_size < 1 || level.kernel_size % 2 == 0 || level.iterations < 0)
      throw ContractError("invalid scale level in schedule");
    run_level(frames, scene, cam, lw, level, opt, iteration, result.trace);
  }
  return result;
}

MappingResult run_global_optimization(std::vector<FrameRecord>& frames, Scene& scene,
                                      const Camera& cam, const LossWeights& lw,
                                      const ScaleLevel& level, MappingOptions opt) {
  if (!(lw.lambda_reg > 0.0)) throw ContractError("global optimization needs lambda_reg > 0");
  opt.global_loss = true;
  return run_mapping(frames, scene, cam, lw, {level}, opt);
}

MappingResult final_refinement(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                               const LossWeights& lw, const std::vector<ScaleLevel>& schedule,
                               MappingOptions opt) {
  opt.optimize_endpoints = true;
  opt.optimize_corrections = false;
  opt.optimize_exposure = true;
  return run_mapping(frames, scene, cam, lw, schedule, opt);
}

void apply_depth_update(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                        const std::map<int, Image>& updates) {
  for (const auto& [index, depth] : updates) {
    const auto it = std::find_if(frames.begin(), frames.end(),
                                 [index = index](const FrameRecord& fr) { return fr.index == index; });
    if (it == frames.end())
      throw ContractError("depth update for unknown keyframe " + std::to_string(index));
    scene::deform_gaussians(scene, it->reference_pose(), cam, it->depth_obs, depth);
    it->depth_obs = depth;
  }
}

void write_loss_trace(std::ostream& os, const std::vector<LossTraceRow>& trace) {
  os << "iteration,scale,sharp,deblurred,fail,regularizer,total\n" << std::setprecision(10);
  for (const LossTraceRow& r : trace) {
    os << r.iteration << ',' << r.factor << ',' << r.sharp << ',' << r.deblurred << ',' << r.fail
       << ',' << r.regularizer << ',' << r.total << '\n';
  }
}

void save_loss_trace(const std::filesystem::path& path, const std::vector<LossTraceRow>& trace) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_loss_trace(os, trace);
}

}  // namespace blursplat::mapping
