#include "blursplat/pipeline/reference.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "blursplat/error.hpp"
#include "blursplat/imaging/color.hpp"
#include "blursplat/imaging/raster_io.hpp"
#include "blursplat/pipeline/dataset.hpp"
#include "blursplat/scene/render.hpp"

namespace blursplat::pipeline {

namespace fs = std::filesystem;
using geometry::SE3Pose;
using geometry::Vec3;
using geometry::Vec4;

namespace {

struct Segment {
  double speed;
  double exposure;
};

Segment segment_for(const ReferenceSpec& spec, char code) {
  switch (code) {
    case 'S': return {spec.speed_sharp, spec.exposure_sharp};
    case 'D': return {spec.speed_deblur, spec.exposure_deblur};
    case 'F': return {spec.speed_fail, spec.exposure_fail};
    default: throw ConfigError(std::string("unknown plan code '") + code + "'");
  }
}

Vec4 random_quaternion(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-max_angle, max_angle);
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  return geometry::so3_exp<double>(u(rng) * axis);
}

imaging::Image encode(const imaging::Image& linear) {
  imaging::Image clamped = linear;
  for (double& v : clamped.data()) v = std::clamp(v, 0.0, 1.0);
  return imaging::linear_to_srgb(clamped);
}

}  // namespace

scene::Camera reference_camera(const ReferenceSpec& spec) {
  scene::Camera cam;
  cam.width = spec.width;
  cam.height = spec.height;
  cam.fx = cam.fy = spec.focal;
  cam.cx = (spec.width - 1) / 2.0;
  cam.cy = (spec.height - 1) / 2.0;
  return cam;
}

scene::Scene make_reference_scene(const ReferenceSpec& spec) {
  std::mt19937_64 rng(spec.scene_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  scene::Scene scene;
  // Wall: 20 x 9 lattice at z = 2 with jittered, colourful, flattened blobs.
  for (int row = 0; row < 9; ++row) {
    for (int col = 0; col < 20; ++col) {
      scene::Gaussian3D g;
      g.mean = Vec3(-1.1 + 0.32 * col + 0.05 * (unit(rng) - 0.5), -1.12 + 0.28 * row + 0.05 * (unit(rng) - 0.5),
                    2.0 + 0.02 * (unit(rng) - 0.5));
      g.rotation = geometry::so3_exp<double>(Vec3(0, 0, std::numbers::pi * unit(rng)));
      g.scale = Vec3(0.08 + 0.05 * unit(rng), 0.07 + 0.04 * unit(rng), 0.03);
      g.opacity = 0.97;
      g.color = Vec3(0.05 + 0.85 * unit(rng), 0.05 + 0.85 * unit(rng), 0.05 + 0.85 * unit(rng));
      scene.push_back(g);
    }
  }
  // Foreground blobs between the camera path and the wall.
  for (int i = 0; i < 20; ++i) {
    scene::Gaussian3D g;
    g.mean = Vec3(-0.6 + 4.6 * unit(rng), -0.6 + 1.2 * unit(rng), 1.2 + 0.4 * unit(rng));
    g.rotation = random_quaternion(rng, std::numbers::pi);
    g.scale = Vec3(0.05 + 0.07 * unit(rng), 0.05 + 0.07 * unit(rng), 0.05 + 0.07 * unit(rng));
    g.opacity = 0.9;
    g.color = Vec3(0.1 + 0.8 * unit(rng), 0.1 + 0.8 * unit(rng), 0.1 + 0.8 * unit(rng));
    scene.push_back(g);
  }
  return scene;
}

imaging::Image normalized_depth(const imaging::Image& depth, const imaging::Image& alpha) {
  imaging::Image out = imaging::Image::like(depth);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double a = alpha.data()[i];
    out.data()[i] = a >= 0.5 ? depth.data()[i] / a : 0.0;
  }
  return out;
}

void render_reference_frames(const fs::path& dir, const ReferenceSpec& spec) {
  if (spec.samples < 1) throw ConfigError("samples per exposure must be >= 1");
  const scene::Camera cam = reference_camera(spec);
  const scene::Scene scene = make_reference_scene(spec);
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "depth");
  save_camera(dir / "camera.cfg", cam);

  tracking::Trajectory traj;
  double x = 0.0;
  int index = 0;
  for (std::size_t f = 0; f < spec.plan.size(); ++f) {
    const Segment seg = segment_for(spec, spec.plan[f]);
    if (f > 0) x += seg.speed * spec.frame_interval;
    const double t_mid = static_cast<double>(f) * spec.frame_interval;
    for (int s = 0; s < spec.samples; ++s) {
      const double offset =
          spec.samples == 1 ? 0.0 : seg.exposure * (static_cast<double>(s) / (spec.samples - 1) - 0.5);
      const SE3Pose pose = SE3Pose::from_translation(Vec3(x + seg.speed * offset, 0.0, 0.0));
      const scene::RenderOutput r = scene::render(scene, cam, pose);
      char name[32];
      std::snprintf(name, sizeof name, "%05d", index++);
      imaging::write_png(dir / "frames" / (std::string(name) + ".png"), encode(r.color));
      imaging::write_pfm(dir / "depth" / (std::string(name) + ".pfm"), normalized_depth(r.depth, r.alpha));
      traj.push_back({t_mid + offset, pose});
    }
  }
  tracking::save_tum(dir / "trajectory.txt", traj);
}

void make_reference_dataset(const fs::path& dir, const ReferenceSpec& spec) {
  render_reference_frames(dir / "source", spec);
  SynthOptions opt;
  opt.frames_dir = dir / "source";
  opt.out_dir = dir;
  opt.window = spec.samples;
  opt.plan = spec.plan;
  synthesize_dataset(opt);
}

std::vector<synth::BenchmarkPair> reference_benchmark_pairs(int count, int n, unsigned long seed) {
  const ReferenceSpec spec;
  const scene::Camera cam = reference_camera(spec);
  const scene::Scene scene = make_reference_scene(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<synth::BenchmarkPair> pairs;
  for (int i = 0; i < count; ++i) {
    // Sweep of 0.2 to 0.5 m (6 to 15 px on the wall) in a random image-plane direction.
    const Vec3 center(3.6 * unit(rng), 0.3 * (unit(rng) - 0.5), 0.2 * (unit(rng) - 0.5));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const Vec3 sweep = (0.2 + 0.3 * unit(rng)) * Vec3(std::cos(angle), std::sin(angle), 0.0);
    synth::FrameSequence seq;
    for (int s = 0; s < n; ++s) {
      const double u = n == 1 ? 0.0 : static_cast<double>(s) / (n - 1) - 0.5;
      seq.frames.push_back(encode(scene::render(scene, cam, SE3Pose::from_translation(center + u * sweep)).color));
    }
    pairs.push_back(synth::make_benchmark_pair(seq, n));
  }
  return pairs;
}

}  // namespace blursplat::pipeline
