#include <benchmark/benchmark.h>

#include "blursplat/blur/blur_proposal.hpp"
#include "blursplat/mapping/losses.hpp"
#include "blursplat/pipeline/reference.hpp"
#include "blursplat/scene/render.hpp"

namespace {

using namespace blursplat;

const scene::Scene& reference_scene() {
  static const scene::Scene s = pipeline::make_reference_scene();
  return s;
}

const scene::Camera& reference_cam() {
  static const scene::Camera c = pipeline::reference_camera();
  return c;
}

void BM_Render(benchmark::State& state) {
  const auto pose = geometry::SE3Pose::from_translation({1.0, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(scene::render(reference_scene(), reference_cam(), pose));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_RenderGradients(benchmark::State& state) {
  const auto& cam = reference_cam();
  const auto pose = geometry::SE3Pose::from_translation({1.0, 0.0, 0.0});
  const imaging::Image gc(cam.width, cam.height, 3, imaging::ColorSpace::Linear, 0.1);
  const imaging::Image gd(cam.width, cam.height, 1, imaging::ColorSpace::Linear, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(scene::render_gradients(reference_scene(), cam, pose, gc, gd));
}
BENCHMARK(BM_RenderGradients)->Unit(benchmark::kMillisecond);

void BM_BlurProposal(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto& cam = reference_cam();
  const auto r = scene::render(reference_scene(), cam, geometry::SE3Pose::identity());
  blur::BlurProposal bp(k, cam.width, cam.height);
  for (auto _ : state) benchmark::DoNotOptimize(blur::apply_blur_proposal(r.color, r.depth, bp));
}
BENCHMARK(BM_BlurProposal)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_BlurProposalBackward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto& cam = reference_cam();
  const auto r = scene::render(reference_scene(), cam, geometry::SE3Pose::identity());
  blur::BlurProposal bp(k, cam.width, cam.height);
  const imaging::Image adj(cam.width, cam.height, 3, imaging::ColorSpace::Linear, 0.1);
  for (auto _ : state) {
    imaging::Image img_adj = imaging::Image::like(r.color);
    imaging::Image depth_adj = imaging::Image::like(r.depth);
    blur::BlurProposalGradient grad(bp);
    blur::apply_blur_proposal_backward(r.color, r.depth, bp, nullptr, adj, &img_adj, &depth_adj, grad);
    benchmark::DoNotOptimize(grad);
  }
}
BENCHMARK(BM_BlurProposalBackward)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
