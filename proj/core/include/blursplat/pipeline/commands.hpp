#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blursplat/detect/metric.hpp"
#include "blursplat/error.hpp"
#include "blursplat/geometry/se3.hpp"
#include "blursplat/pipeline/config.hpp"
#include "blursplat/pipeline/dataset.hpp"
#include "blursplat/synth/blur_synth.hpp"

namespace blursplat::pipeline {

/// A stage of cmd_run aborted; partial artifacts and failure.txt are kept.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct FrameReport {
  int frame = 0;
  double timestamp = 0.0;
  std::string planned;
  std::string frame_class = "-";  // "-" when unknown (cmd_eval without a run report)
  std::optional<double> psnr;     // render vs ground-truth sharp, sRGB
  std::optional<double> ssim;
  std::optional<double> input_psnr;  // blurred input vs ground-truth sharp
};

struct RunReport {
  std::vector<FrameReport> frames;
  std::optional<double> ate_rmse;
  int ate_matched = 0;
  std::string loss_trace;  // path relative to the run directory
  std::vector<std::string> notices;
  std::vector<std::pair<std::string, double>> stage_seconds;

  /// Means over frames with ground truth whose planned class is in `planned`
  /// (all frames when empty). NaN if none qualify.
  double mean_psnr(const std::vector<std::string>& planned = {}) const;
  double mean_input_psnr(const std::vector<std::string>& planned = {}) const;
  /// Fraction of frames whose detected class equals the planned one.
  double class_agreement() const;
};

/// Per-frame table; no timing, so identical runs give identical bytes.
void write_report_tsv(std::ostream& os, const RunReport& report);
std::vector<FrameReport> read_report_tsv(std::istream& is);
void write_summary(std::ostream& os, const RunReport& report);

/// Renders the reference sources and synthesizes the dataset into `out`.
SynthSummary cmd_synth(const SynthOptions& opt);

/// Tracks every frame, maps, refines and writes the run directory:
///   config.snapshot, trajectory_est.txt, scene.txt, renders/NNNN.png,
///   losses.csv, report.tsv, summary.txt
/// Throws StageError after writing failure.txt when a stage aborts.
RunReport cmd_run(const RunConfig& cfg);

/// Scores a run directory against a dataset with ground truth. Frame
/// classes come from the run's report.tsv when present. Metrics without
/// ground truth are omitted and listed in `notices`.
RunReport cmd_eval(const std::filesystem::path& run_dir, const std::filesystem::path& gt_dir);

struct MetricRow {
  std::string metric;
  double accuracy = 0.0;     // percent
  double effect_size = 0.0;  // NaN when flagged
  double consistency = 0.0;  // NaN when flagged
  std::string flag;          // empty, or the reason the row is degenerate
};

/// Pairs every manifest row with a sharp image: (sharp, blurred) scores for
/// the builtin metric and for each external score table (keyed by the
/// manifest paths). Rows are sorted by consistency, flagged rows last.
std::vector<MetricRow> cmd_bench_metrics(const std::filesystem::path& pairs_dir,
                                         const std::vector<std::filesystem::path>& score_files = {});
void write_metric_table(std::ostream& os, const std::vector<MetricRow>& rows);

/// Builtin raw scores of every (sharp, blurred) pair of a pairs directory.
struct RawPairScores {
  std::vector<double> sharp;
  std::vector<double> blurred;
};
RawPairScores builtin_pair_scores(const std::filesystem::path& pairs_dir);

struct DetectorCalibration {
  double tau_sharp = 0.0;
  double tau_success = 0.0;
};

/// Builtin-metric thresholds from benchmark pairs: tau_sharp separates sharp
/// from blurred scores; tau_success separates the combined score of an
/// oracle restoration (blurred -> sharp) from that of no restoration.
DetectorCalibration calibrate_detector(const std::vector<synth::BenchmarkPair>& pairs,
                                       double weight_laplacian = kDefaultWeightLaplacian);
std::vector<synth::BenchmarkPair> load_benchmark_pairs(const std::filesystem::path& dir);

/// Writes benchmark pairs in the dataset layout (manifest, sharp/, blurred/).
void write_benchmark_pairs(const std::filesystem::path& dir, const std::vector<synth::BenchmarkPair>& pairs);

/// Renders a scene file from `pose` and writes an sRGB PNG.
void cmd_render(const std::filesystem::path& scene_file, const Camera& cam, const geometry::SE3Pose& pose,
                const std::filesystem::path& out_png);

}  // namespace blursplat::pipeline
