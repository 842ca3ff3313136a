#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "blursplat/mapping/losses.hpp"

namespace blursplat::mapping {

struct LearningRates {
  double means = 2e-3;
  double log_scales = 1e-2;
  double rotations = 5e-3;
  double opacity_logits = 5e-2;
  double colors = 1e-2;
  double exposure = 1e-2;
  double proposals = 5e-2;
  double corrections = 1e-3;
  double endpoints = 2e-3;
};

struct MappingOptions {
  LearningRates lr;
  bool optimize_exposure = true;
  bool optimize_corrections = true;  // Fail-frame sub-frame twists
  bool optimize_endpoints = false;   // Fail-frame trajectory endpoints
  bool global_loss = false;          // add the scale regularizer
  bool gate_by_alpha = true;
  int iteration_offset = 0;          // first iteration number in the trace
};

struct LossTraceRow {
  int iteration = 0;
  int factor = 1;
  double sharp = 0.0;
  double deblurred = 0.0;
  double fail = 0.0;
  double regularizer = 0.0;
  double total = 0.0;
};

struct MappingResult {
  std::vector<LossTraceRow> trace;
};

/// Coarse-to-fine optimization of the scene and the per-frame blur, exposure
/// and Fail-trajectory parameters. Sharp and Deblurred poses are never
/// modified. Throws NumericalError if the loss becomes non-finite.
MappingResult run_mapping(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                          const LossWeights& lw, const std::vector<ScaleLevel>& schedule,
                          const MappingOptions& opt = {});

/// run_mapping on loss_global at a single level.
MappingResult run_global_optimization(std::vector<FrameRecord>& frames, Scene& scene,
                                      const Camera& cam, const LossWeights& lw,
                                      const ScaleLevel& level, MappingOptions opt = {});

/// One more schedule pass with Fail-frame endpoints and exposures re-opened
/// and their sub-frame corrections frozen; every other pose stays fixed.
MappingResult final_refinement(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                               const LossWeights& lw, const std::vector<ScaleLevel>& schedule,
                               MappingOptions opt = {});

/// Deforms the scene for each updated keyframe depth (ascending frame index)
/// and stores the new depth as the frame's observation.
void apply_depth_update(std::vector<FrameRecord>& frames, Scene& scene, const Camera& cam,
                        const std::map<int, Image>& updates);

/// CSV: iteration,scale,sharp,deblurred,fail,regularizer,total
void write_loss_trace(std::ostream& os, const std::vector<LossTraceRow>& trace);
void save_loss_trace(const std::filesystem::path& path, const std::vector<LossTraceRow>& trace);

}  // namespace blursplat::mapping
