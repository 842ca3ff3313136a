#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blursplat/scene/gaussian.hpp"
#include "blursplat/tracking/trajectory_io.hpp"

namespace blursplat::pipeline {

using imaging::Image;
using scene::Camera;
using tracking::Trajectory;

/// One row of manifest.tsv. Paths are relative to the dataset root.
struct ManifestRow {
  int frame = 0;
  double timestamp = 0.0;
  std::string planned = "sharp";  // sharp | deblurred | fail
  int n_averaged = 1;
  std::string blurred;
  std::string sharp;
  std::string depth;  // may be empty
};

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> load_manifest(const std::filesystem::path& path);

/// Camera start and end pose of one frame's exposure.
struct ExposureWindow {
  int frame = 0;
  geometry::SE3Pose start;
  geometry::SE3Pose end;
};

/// "frame  start(tx ty tz qx qy qz qw)  end(tx ty tz qx qy qz qw)" per line.
void save_exposure_windows(const std::filesystem::path& path, const std::vector<ExposureWindow>& w);
std::vector<ExposureWindow> load_exposure_windows(const std::filesystem::path& path);

/// width, height, fx, fy, cx, cy as key = value lines.
void save_camera(const std::filesystem::path& path, const Camera& cam);
Camera load_camera(const std::filesystem::path& path);

/// A synthesized dataset directory:
///   manifest.tsv, dataset.cfg, blurred/*.png, sharp/*.png, depth/*.pfm,
///   trajectory_gt.txt (TUM), exposure_gt.txt
struct Dataset {
  std::filesystem::path root;
  Camera camera;
  std::vector<ManifestRow> rows;
  Trajectory ground_truth;                  // empty when absent
  std::map<int, ExposureWindow> exposures;  // empty when absent

  static Dataset load(const std::filesystem::path& root);

  Image blurred(std::size_t i) const;  // SrgbEncoded
  std::optional<Image> sharp(std::size_t i) const;
  std::optional<Image> depth(std::size_t i) const;
  std::optional<geometry::SE3Pose> gt_pose(std::size_t i) const;
};

/// Dense source frames grouped into exposure windows.
struct SynthOptions {
  std::filesystem::path frames_dir;  // frames/*.png, optional depth/<stem>.pfm,
                                     // trajectory.txt and camera.cfg
  std::filesystem::path out_dir;
  int window = 9;
  std::string plan;  // one of S/D/F per window; default D (S when window == 1)
};

struct SynthSummary {
  int windows = 0;
  int source_frames = 0;
};

/// Averages each window of consecutive source frames in linear light and
/// writes the dataset layout above. All unreadable inputs are reported in a
/// single IoError.
SynthSummary synthesize_dataset(const SynthOptions& opt);

std::string planned_class_name(char plan_code);

}  // namespace blursplat::pipeline
