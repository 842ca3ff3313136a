#include "blursplat/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include "blursplat/blur/subframe.hpp"
#include "blursplat/detect/scores.hpp"
#include "blursplat/error.hpp"
#include "blursplat/imaging/color.hpp"
#include "blursplat/imaging/metrics.hpp"
#include "blursplat/imaging/raster_io.hpp"
#include "blursplat/mapping/mapper.hpp"
#include "blursplat/pipeline/ate.hpp"
#include "blursplat/scene/render.hpp"
#include "blursplat/scene/scene_io.hpp"
#include "blursplat/tracking/tracker.hpp"

namespace blursplat::pipeline {

namespace fs = std::filesystem;
using detect::FrameClass;
using geometry::SE3Pose;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

std::optional<double> parse_optional(const std::string& s) {
  if (s == "-") return std::nullopt;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw IoError("bad number '" + s + "' in report");
  }
}

std::string render_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d.png", frame);
  return buf;
}

Image to_display(const Image& linear) {
  Image clamped = linear;
  for (double& v : clamped.data()) v = std::clamp(v, 0.0, 1.0);
  return imaging::linear_to_srgb(clamped);
}

Image below_alpha(const Image& alpha, double threshold) {
  Image mask = Image::like(alpha);
  for (std::size_t i = 0; i < alpha.size(); ++i) mask.data()[i] = alpha.data()[i] < threshold ? 1.0 : 0.0;
  return mask;
}

double mean_of(const std::vector<FrameReport>& frames, const std::vector<std::string>& planned,
               std::optional<double> FrameReport::*field) {
  double sum = 0.0;
  int n = 0;
  for (const auto& f : frames) {
    if (!(f.*field)) continue;
    if (!planned.empty() && std::find(planned.begin(), planned.end(), f.planned) == planned.end()) continue;
    sum += *(f.*field);
    ++n;
  }
  return n == 0 ? kNaN : sum / n;
}

/// Scores images of the current frame from an external table by matching
/// them against the blurred and sharp images the table was computed on.
struct ExternalScoreLookup {
  detect::ScoreTable table;
  std::vector<std::pair<Image, std::string>> current;

  double score(const Image& img) const {
    for (const auto& [known, key] : current) {
      if (known.same_shape(img) && std::equal(known.data().begin(), known.data().end(), img.data().begin()))
        return table.at(key);
    }
    throw ContractError("no external score for this image");
  }
};

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& r) : report_(r), start_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    report_.stage_seconds.emplace_back(stage, std::chrono::duration<double>(now - start_).count());
    start_ = now;
  }

 private:
  RunReport& report_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

double RunReport::mean_psnr(const std::vector<std::string>& planned) const {
  return mean_of(frames, planned, &FrameReport::psnr);
}

double RunReport::mean_input_psnr(const std::vector<std::string>& planned) const {
  return mean_of(frames, planned, &FrameReport::input_psnr);
}

double RunReport::class_agreement() const {
  if (frames.empty()) return kNaN;
  int agree = 0;
  for (const auto& f : frames) agree += f.frame_class == f.planned ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(frames.size());
}

void write_report_tsv(std::ostream& os, const RunReport& report) {
  os << "frame\ttimestamp\tplanned\tclass\tpsnr\tssim\tinput_psnr\n";
  for (const auto& f : report.frames) {
    os << f.frame << '\t' << format_number(f.timestamp) << '\t' << f.planned << '\t' << f.frame_class << '\t'
       << format_optional(f.psnr) << '\t' << format_optional(f.ssim) << '\t' << format_optional(f.input_psnr)
       << '\n';
  }
}

std::vector<FrameReport> read_report_tsv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("frame\t", 0) != 0) throw IoError("report.tsv: missing header");
  std::vector<FrameReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(ls, col, '\t')) cols.push_back(col);
    if (cols.size() != 7) throw IoError("report.tsv: expected 7 columns in '" + line + "'");
    FrameReport f;
    f.frame = std::stoi(cols[0]);
    f.timestamp = std::stod(cols[1]);
    f.planned = cols[2];
    f.frame_class = cols[3];
    f.psnr = parse_optional(cols[4]);
    f.ssim = parse_optional(cols[5]);
    f.input_psnr = parse_optional(cols[6]);
    out.push_back(f);
  }
  return out;
}

void write_summary(std::ostream& os, const RunReport& report) {
  os << "frames            " << report.frames.size() << '\n';
  if (report.ate_rmse)
    os << "ate_rmse_m        " << format_number(*report.ate_rmse) << " (" << report.ate_matched << " poses)\n";
  os << "psnr_render_db    " << format_number(report.mean_psnr()) << '\n';
  os << "psnr_input_db     " << format_number(report.mean_input_psnr()) << '\n';
  const std::vector<std::string> blurred = {"deblurred", "fail"};
  os << "psnr_render_blurred_db " << format_number(report.mean_psnr(blurred)) << '\n';
  os << "psnr_input_blurred_db  " << format_number(report.mean_input_psnr(blurred)) << '\n';
  os << "class_agreement   " << format_number(report.class_agreement()) << '\n';
  if (!report.loss_trace.empty()) os << "loss_trace        " << report.loss_trace << '\n';
  for (const auto& n : report.notices) os << "notice            " << n << '\n';
  for (const auto& [stage, seconds] : report.stage_seconds)
    os << "seconds." << stage << std::string(stage.size() < 10 ? 10 - stage.size() : 1, ' ') << seconds << '\n';
}

SynthSummary cmd_synth(const SynthOptions& opt) { return synthesize_dataset(opt); }

RunReport cmd_eval(const fs::path& run_dir, const fs::path& gt_dir) {
  const Dataset ds = Dataset::load(gt_dir);
  RunReport report;

  std::map<int, std::string> classes;
  if (fs::exists(run_dir / "report.tsv")) {
    std::ifstream in(run_dir / "report.tsv");
    for (const auto& f : read_report_tsv(in)) classes[f.frame] = f.frame_class;
  }

  int missing_sharp = 0;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const ManifestRow& row = ds.rows[i];
    FrameReport f;
    f.frame = row.frame;
    f.timestamp = row.timestamp;
    f.planned = row.planned;
    if (auto it = classes.find(row.frame); it != classes.end()) f.frame_class = it->second;
    const auto sharp = ds.sharp(i);
    if (!sharp) {
      ++missing_sharp;
    } else {
      f.input_psnr = imaging::psnr(ds.blurred(i), *sharp);
      const fs::path render_path = run_dir / "renders" / render_name(row.frame);
      if (fs::exists(render_path)) {
        const Image rendered = imaging::read_png(render_path);
        f.psnr = imaging::psnr(rendered, *sharp);
        f.ssim = imaging::ssim(rendered, *sharp);
      } else {
        report.notices.push_back("no render for frame " + std::to_string(row.frame));
      }
    }
    report.frames.push_back(f);
  }
  if (missing_sharp > 0)
    report.notices.push_back(std::to_string(missing_sharp) + " frame(s) without ground-truth sharp image; PSNR omitted");

  const fs::path est_path = run_dir / "trajectory_est.txt";
  if (ds.ground_truth.empty()) {
    report.notices.push_back("no ground-truth trajectory; ATE omitted");
  } else if (!fs::exists(est_path)) {
    report.notices.push_back("no estimated trajectory; ATE omitted");
  } else {
    try {
      const AteResult ate = absolute_trajectory_error(tracking::load_tum(est_path), ds.ground_truth);
      report.ate_rmse = ate.rmse;
      report.ate_matched = ate.matched;
    } catch (const ContractError& e) {
      report.notices.push_back(std::string("ATE omitted: ") + e.what());
    }
  }
  if (fs::exists(run_dir / "losses.csv")) report.loss_trace = "losses.csv";
  return report;
}

RunReport cmd_run(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.output.empty()) throw ConfigError("output directory not set");
  if (!fs::is_directory(cfg.dataset)) throw ConfigError("dataset directory '" + cfg.dataset.string() + "' does not exist");
  if (cfg.provider == "external-scores" && !fs::exists(cfg.scores_file))
    throw ConfigError("scores file '" + cfg.scores_file.string() + "' does not exist");

  fs::create_directories(cfg.output / "renders");
  {
    std::ofstream snap(cfg.output / "config.snapshot");
    snap << cfg.to_map().dump();
  }

  RunReport timing;
  Stopwatch clock(timing);
  std::string stage = "load";
  std::map<int, std::string> classes;
  try {
    const Dataset ds = Dataset::load(cfg.dataset);
    const Camera& cam = ds.camera;
    const std::size_t n = ds.rows.size();
    if (n == 0) throw ContractError("dataset has no frames");

    std::vector<SE3Pose> gt_poses;
    std::vector<Image> depths;
    std::map<int, Image> restorable;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pose = ds.gt_pose(i);
      if (!pose) throw ContractError("oracle tracker needs a ground-truth pose for frame " + std::to_string(i));
      gt_poses.push_back(*pose);
      auto depth = ds.depth(i);
      if (!depth) throw ContractError("oracle depth needs a depth map for frame " + std::to_string(i));
      depths.push_back(std::move(*depth));
      if (ds.rows[i].planned == "deblurred") {
        if (auto sharp = ds.sharp(i)) restorable.emplace(static_cast<int>(i), std::move(*sharp));
      }
    }
    clock.lap(stage);

    stage = "tracking";
    tracking::GroundTruthTracker tracker(gt_poses);
    tracking::GroundTruthDepth depth_oracle(depths);
    tracking::MiddleFrameDeblurOracle deblur_oracle(restorable);
    const tracking::Providers providers{&tracker, &depth_oracle, &deblur_oracle};

    tracking::DetectorState detector;
    detector.thresholds = cfg.thresholds;
    detector.forced = cfg.force_class;
    auto lookup = std::make_shared<ExternalScoreLookup>();
    if (cfg.provider == "external-scores") {
      lookup->table = detect::load_score_table(cfg.scores_file);
      detector.metric.name = lookup->table.metric_name;
      detector.metric.polarity = lookup->table.polarity;
      detector.metric.score = [lookup](const Image& img) { return lookup->score(img); };
    }
    tracking::DetectorState bootstrap = detector;
    bootstrap.forced = FrameClass::Sharp;

    tracking::PoseHistory history;
    std::vector<mapping::FrameRecord> frames;
    for (std::size_t i = 0; i < n; ++i) {
      const int idx = static_cast<int>(i);
      const Image input = ds.blurred(i);
      if (cfg.provider == "external-scores") {
        lookup->current.clear();
        lookup->current.emplace_back(input, ds.rows[i].blurred);
        if (auto it = restorable.find(idx); it != restorable.end()) lookup->current.emplace_back(it->second, ds.rows[i].sharp);
      }
      const bool boot = idx < cfg.bootstrap_frames;
      const tracking::TrackedFrame tf =
          tracking::track_frame(idx, ds.rows[i].timestamp, input, history, providers, boot ? bootstrap : detector);
      classes[ds.rows[i].frame] = detect::to_string(tf.frame_class);

      mapping::FrameRecord fr;
      fr.index = idx;
      fr.timestamp = ds.rows[i].timestamp;
      fr.image_obs = imaging::srgb_to_linear(tf.observation);
      fr.depth_obs = tf.depth;
      fr.frame_class = tf.frame_class;
      fr.pose = tf.pose;
      if (tf.frame_class == FrameClass::Fail) {
        if (cfg.endpoints == "oracle") {
          const auto it = ds.exposures.find(ds.rows[i].frame);
          if (it == ds.exposures.end())
            throw ContractError("endpoints=oracle needs exposure_gt.txt entry for frame " + std::to_string(ds.rows[i].frame));
          fr.trajectory = blur::VirtualTrajectory(it->second.start, it->second.end, cfg.n_sub);
        } else {
          fr.trajectory = blur::VirtualTrajectory(tf.pose, tf.pose, cfg.n_sub);
        }
      }
      frames.push_back(std::move(fr));
    }
    clock.lap(stage);

    stage = "seeding";
    std::vector<mapping::FrameRecord> mapped;
    for (auto& fr : frames) {
      if (fr.frame_class == FrameClass::Fail && !cfg.fallback) continue;
      mapped.push_back(fr);
    }
    if (mapped.empty()) throw ContractError("no frames left to map");
    scene::Scene scene;
    const int offset = static_cast<int>((cfg.seed_stride / 2 + cfg.seed) % static_cast<unsigned long>(cfg.seed_stride));
    for (const auto& fr : mapped) {
      const SE3Pose pose = fr.reference_pose();
      const Image alpha = scene.empty() ? Image(cam.width, cam.height, 1) : scene::render(scene, cam, pose).alpha;
      const Image where = below_alpha(alpha, blur::kUnderReconstructedAlpha);
      const auto seeds = scene::seed_gaussians_from_depth(fr.image_obs, fr.depth_obs, cam, pose, cfg.seed_stride, offset, &where);
      scene.insert(scene.end(), seeds.begin(), seeds.end());
    }
    if (scene.empty()) throw ContractError("no Gaussians could be seeded (no valid depth)");
    clock.lap(stage);

    stage = "mapping";
    mapping::MappingOptions opt;
    opt.lr = cfg.learning_rates;
    mapping::MappingResult result = mapping::run_mapping(mapped, scene, cam, cfg.weights, cfg.schedule, opt);
    clock.lap(stage);

    if (cfg.refine) {
      stage = "refinement";
      opt.iteration_offset = result.trace.empty() ? 0 : result.trace.back().iteration + 1;
      const mapping::MappingResult refined = mapping::final_refinement(mapped, scene, cam, cfg.weights, cfg.schedule, opt);
      result.trace.insert(result.trace.end(), refined.trace.begin(), refined.trace.end());
      clock.lap(stage);
    }

    stage = "export";
    mapping::save_loss_trace(cfg.output / "losses.csv", result.trace);
    scene::save_scene(cfg.output / "scene.txt", scene);
    std::map<int, SE3Pose> refined_poses;
    for (const auto& fr : mapped) refined_poses[fr.index] = fr.reference_pose();
    tracking::Trajectory est;
    for (const auto& fr : frames) {
      const auto it = refined_poses.find(fr.index);
      const SE3Pose pose = it != refined_poses.end() ? it->second : fr.reference_pose();
      est.push_back({fr.timestamp, pose});
      imaging::write_png(cfg.output / "renders" / render_name(ds.rows[fr.index].frame),
                         to_display(scene::render(scene, cam, pose).color));
    }
    tracking::save_tum(cfg.output / "trajectory_est.txt", est);
    clock.lap(stage);

    stage = "evaluation";
    RunReport report = cmd_eval(cfg.output, cfg.dataset);
    for (auto& f : report.frames) {
      if (auto it = classes.find(f.frame); it != classes.end()) f.frame_class = it->second;
    }
    report.loss_trace = "losses.csv";
    {
      std::ofstream out(cfg.output / "report.tsv");
      write_report_tsv(out, report);
    }
    clock.lap(stage);
    report.stage_seconds = timing.stage_seconds;
    std::ofstream summary(cfg.output / "summary.txt");
    write_summary(summary, report);
    return report;
  } catch (const std::exception& e) {
    std::ofstream failure(cfg.output / "failure.txt");
    failure << "stage\t" << stage << "\nerror\t" << e.what() << '\n';
    for (const auto& [frame, cls] : classes) failure << "class\t" << frame << '\t' << cls << '\n';
    throw StageError(stage, e.what());
  }
}

RawPairScores builtin_pair_scores(const fs::path& pairs_dir) {
  const Dataset ds = Dataset::load(pairs_dir);
  const detect::MetricPlugin metric = detect::builtin_sharpness_metric();
  RawPairScores out;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const auto sharp = ds.sharp(i);
    if (!sharp) continue;
    out.sharp.push_back(metric.score(*sharp));
    out.blurred.push_back(metric.score(ds.blurred(i)));
  }
  return out;
}

std::vector<MetricRow> cmd_bench_metrics(const fs::path& pairs_dir, const std::vector<fs::path>& score_files) {
  const std::vector<ManifestRow> rows = load_manifest(pairs_dir / "manifest.tsv");
  std::vector<detect::PairScores> tables;

  const RawPairScores builtin = builtin_pair_scores(pairs_dir);
  detect::PairScores b{"lapvar", detect::Polarity::HigherIsSharper, {}};
  for (std::size_t i = 0; i < builtin.sharp.size(); ++i) b.pairs.push_back({builtin.sharp[i], builtin.blurred[i]});
  tables.push_back(std::move(b));

  for (const auto& file : score_files) {
    const detect::ScoreTable t = detect::load_score_table(file);
    detect::PairScores ps{t.metric_name, t.polarity, {}};
    for (const auto& r : rows) {
      if (r.sharp.empty()) continue;
      ps.pairs.push_back({t.at(r.sharp), t.at(r.blurred)});
    }
    tables.push_back(std::move(ps));
  }

  std::vector<MetricRow> out;
  for (const auto& ps : tables) {
    MetricRow row;
    row.metric = ps.metric_name;
    if (ps.pairs.empty()) {
      row.accuracy = kNaN;
      row.effect_size = row.consistency = kNaN;
      row.flag = "no-pairs";
      out.push_back(row);
      continue;
    }
    row.accuracy = detect::ranking_accuracy(ps);
    if (ps.pairs.size() < 2) {
      row.effect_size = row.consistency = kNaN;
      row.flag = "degenerate-single-pair";
      out.push_back(row);
      continue;
    }
    try {
      row.effect_size = detect::cohens_d(ps);
      row.consistency = detect::consistency_score(row.accuracy, row.effect_size);
    } catch (const detect::DegenerateVarianceError& e) {
      row.effect_size = row.consistency = kNaN;
      row.flag = e.what();
    }
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(), [](const MetricRow& a, const MetricRow& b) {
    if (a.flag.empty() != b.flag.empty()) return a.flag.empty();
    if (!a.flag.empty()) return false;
    return a.consistency > b.consistency;
  });
  return out;
}

void write_metric_table(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << "metric\taccuracy\teffect_size\tconsistency\tflag\n";
  for (const auto& r : rows) {
    const auto cell = [](double v) { return std::isnan(v) ? std::string("-") : format_number(v); };
    os << r.metric << '\t' << cell(r.accuracy) << '\t' << cell(r.effect_size) << '\t' << cell(r.consistency) << '\t'
       << (r.flag.empty() ? "-" : r.flag) << '\n';
  }
}

DetectorCalibration calibrate_detector(const std::vector<synth::BenchmarkPair>& pairs, double weight_laplacian) {
  const detect::MetricPlugin metric = detect::builtin_sharpness_metric();
  detect::ClassifierThresholds th;
  th.weight_laplacian = weight_laplacian;
  std::vector<double> sharp, blurred, restored, failed;
  for (const auto& p : pairs) {
    sharp.push_back(metric.score(p.sharp));
    blurred.push_back(metric.score(p.blurred));
    restored.push_back(detect::deblur_success(p.blurred, p.sharp, th, metric).combined);
    failed.push_back(detect::deblur_success(p.blurred, p.blurred, th, metric).combined);
  }
  return {detect::calibrate_tau_sharp(sharp, blurred, metric), detect::calibrate_tau_success(failed, restored)};
}

std::vector<synth::BenchmarkPair> load_benchmark_pairs(const fs::path& dir) {
  const Dataset ds = Dataset::load(dir);
  std::vector<synth::BenchmarkPair> out;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    auto sharp = ds.sharp(i);
    if (!sharp) continue;
    synth::BenchmarkPair p;
    p.blurred = ds.blurred(i);
    p.sharp = std::move(*sharp);
    p.n_averaged = ds.rows[i].n_averaged;
    out.push_back(std::move(p));
  }
  return out;
}

void write_benchmark_pairs(const fs::path& dir, const std::vector<synth::BenchmarkPair>& pairs) {
  fs::create_directories(dir / "sharp");
  fs::create_directories(dir / "blurred");
  std::vector<ManifestRow> rows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", i);
    ManifestRow r;
    r.frame = static_cast<int>(i);
    r.timestamp = static_cast<double>(i);
    r.planned = pairs[i].n_averaged > 1 ? "deblurred" : "sharp";
    r.n_averaged = pairs[i].n_averaged;
    r.blurred = std::string("blurred/") + name;
    r.sharp = std::string("sharp/") + name;
    imaging::write_png(dir / r.blurred, pairs[i].blurred);
    imaging::write_png(dir / r.sharp, pairs[i].sharp);
    rows.push_back(r);
  }
  save_manifest(dir / "manifest.tsv", rows);
  if (!pairs.empty()) {
    Camera cam;
    cam.width = pairs.front().sharp.width();
    cam.height = pairs.front().sharp.height();
    cam.fx = cam.fy = 1.0;
    cam.cx = (cam.width - 1) / 2.0;
    cam.cy = (cam.height - 1) / 2.0;
    save_camera(dir / "dataset.cfg", cam);
  }
}

void cmd_render(const fs::path& scene_file, const Camera& cam, const SE3Pose& pose, const fs::path& out_png) {
  const scene::Scene scene = scene::load_scene(scene_file);
  imaging::write_png(out_png, to_display(scene::render(scene, cam, pose).color));
}

}  // namespace blursplat::pipeline
