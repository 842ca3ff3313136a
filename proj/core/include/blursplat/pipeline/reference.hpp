#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blursplat/scene/gaussian.hpp"
#include "blursplat/synth/blur_synth.hpp"

namespace blursplat::pipeline {

/// Small synthetic world used for end-to-end runs: a textured wall two metres
/// ahead plus a few nearer blobs, seen by a camera translating along +x.
struct ReferenceSpec {
  int width = 64;
  int height = 64;
  double focal = 60.0;
  std::string plan = "SSDSFFFSDS";  // one code per frame: S, D or F
  double frame_interval = 0.1;      // seconds
  int samples = 9;                  // dense frames per exposure
  double speed_sharp = 1.0;         // m/s
  double speed_deblur = 4.0;
  double speed_fail = 10.0;
  double exposure_sharp = 0.01;     // s
  double exposure_deblur = 0.08;
  double exposure_fail = 0.05;
  unsigned long scene_seed = 7;
};

scene::Camera reference_camera(const ReferenceSpec& spec = {});
scene::Scene make_reference_scene(const ReferenceSpec& spec = {});

/// Writes frames/*.png, depth/*.pfm, trajectory.txt and camera.cfg for every
/// dense sample of every exposure window.
void render_reference_frames(const std::filesystem::path& dir, const ReferenceSpec& spec = {});

/// Renders the reference sources into `dir`/source and synthesizes the
/// dataset into `dir`.
void make_reference_dataset(const std::filesystem::path& dir, const ReferenceSpec& spec = {});

/// Depth of a render normalized by its alpha; 0 where alpha < 0.5.
imaging::Image normalized_depth(const imaging::Image& depth, const imaging::Image& alpha);

/// `count` sharp/blurred pairs from random short camera sweeps over the
/// reference scene, each averaged over `n` frames (SrgbEncoded).
std::vector<synth::BenchmarkPair> reference_benchmark_pairs(int count, int n, unsigned long seed);

}  // namespace blursplat::pipeline
