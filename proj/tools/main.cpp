// blursplat command-line front end.
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blursplat/detect/classifier.hpp"
#include "blursplat/error.hpp"
#include "blursplat/pipeline/commands.hpp"
#include "blursplat/pipeline/config.hpp"
#include "blursplat/pipeline/reference.hpp"

namespace fs = std::filesystem;
using namespace blursplat;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

geometry::SE3Pose parse_pose(const std::string& text) {
  std::istringstream is(text);
  double tx, ty, tz, qx, qy, qz, qw;
  if (!(is >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
    throw ConfigError("pose must be 'tx ty tz qx qy qz qw'");
  return geometry::SE3Pose(geometry::Vec4(qw, qx, qy, qz), geometry::Vec3(tx, ty, tz));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blur-aware Gaussian splatting mapping on synthetic sequences"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Build a blurred dataset from sharp source frames");
  pipeline::SynthOptions synth_opt;
  bool synth_reference = false;
  int synth_pairs = 0;
  int pair_window = 9;
  unsigned long synth_seed = 1;
  synth->add_option("--frames", synth_opt.frames_dir, "Source directory (frames/, depth/, trajectory.txt, camera.cfg)");
  synth->add_option("--out", synth_opt.out_dir, "Output dataset directory")->required();
  synth->add_option("--window", synth_opt.window, "Source frames averaged per output frame");
  synth->add_option("--plan", synth_opt.plan, "Planned class per window: S, D or F");
  synth->add_flag("--reference", synth_reference, "Render the built-in reference scene first");
  synth->add_option("--pairs", synth_pairs, "Write N sharp/blurred benchmark pairs instead");
  synth->add_option("--pair-window", pair_window, "Frames averaged per benchmark pair");
  synth->add_option("--seed", synth_seed, "Seed for benchmark pairs");

  // run
  auto* run = app.add_subcommand("run", "Track, map and refine a dataset");
  std::string config_file;
  std::vector<std::string> overrides;
  std::string dataset, output;
  long seed = -1;
  run->add_option("--config", config_file, "key = value configuration file");
  run->add_option("--set", overrides, "Override a configuration key (key=value)");
  run->add_option("--dataset", dataset, "Dataset directory");
  run->add_option("--output", output, "Run directory");
  run->add_option("--seed", seed, "Global seed");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a run directory against ground truth");
  fs::path eval_run, eval_gt;
  eval->add_option("--run", eval_run, "Run directory")->required();
  eval->add_option("--gt", eval_gt, "Dataset directory with ground truth")->required();

  // bench-metrics
  auto* bench = app.add_subcommand("bench-metrics", "Rank blur metrics on sharp/blurred pairs");
  fs::path bench_pairs;
  std::vector<fs::path> bench_scores;
  bool bench_calibrate = false;
  bench->add_option("--pairs", bench_pairs, "Directory with manifest.tsv, sharp/ and blurred/")->required();
  bench->add_option("--scores", bench_scores, "External score table (TSV)");
  bench->add_flag("--calibrate", bench_calibrate, "Also print the builtin metric's tau_sharp");

  // render
  auto* rend = app.add_subcommand("render", "Render a scene file from a pose");
  fs::path render_scene, render_camera, render_out;
  std::string render_pose = "0 0 0 0 0 0 1";
  rend->add_option("--scene", render_scene, "Scene file")->required();
  rend->add_option("--camera", render_camera, "Camera file (width, height, fx, fy, cx, cy)")->required();
  rend->add_option("--pose", render_pose, "World-from-camera pose 'tx ty tz qx qy qz qw'");
  rend->add_option("--out", render_out, "Output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) {
      if (synth_pairs > 0) {
        pipeline::write_benchmark_pairs(synth_opt.out_dir,
                                        pipeline::reference_benchmark_pairs(synth_pairs, pair_window, synth_seed));
        std::cout << "pairs\t" << synth_pairs << '\n';
      } else if (synth_reference) {
        pipeline::ReferenceSpec spec;
        if (!synth_opt.plan.empty()) spec.plan = synth_opt.plan;
        spec.samples = synth_opt.window;
        pipeline::make_reference_dataset(synth_opt.out_dir, spec);
        std::cout << "windows\t" << spec.plan.size() << '\n';
      } else {
        if (synth_opt.frames_dir.empty()) throw ConfigError("synth needs --frames, --reference or --pairs");
        const auto s = pipeline::cmd_synth(synth_opt);
        std::cout << "windows\t" << s.windows << "\nsource_frames\t" << s.source_frames << '\n';
      }
    } else if (*run) {
      pipeline::ConfigMap map;
      if (!config_file.empty()) map = pipeline::ConfigMap::load(config_file);
      if (!dataset.empty()) map.set("dataset", dataset);
      if (!output.empty()) map.set("output", output);
      if (seed >= 0) map.set("seed", std::to_string(seed));
      for (const auto& o : overrides) map.set(o);
      const auto cfg = pipeline::RunConfig::from_map(map);
      const auto report = pipeline::cmd_run(cfg);
      pipeline::write_summary(std::cout, report);
    } else if (*eval) {
      const auto report = pipeline::cmd_eval(eval_run, eval_gt);
      pipeline::write_report_tsv(std::cout, report);
      pipeline::write_summary(std::cerr, report);
    } else if (*bench) {
      pipeline::write_metric_table(std::cout, pipeline::cmd_bench_metrics(bench_pairs, bench_scores));
      if (bench_calibrate) {
        const auto cal = pipeline::calibrate_detector(pipeline::load_benchmark_pairs(bench_pairs));
        std::cout << std::setprecision(6) << "# tau_sharp\t" << cal.tau_sharp << "\n# tau_success\t"
                  << cal.tau_success << '\n';
      }
    } else if (*rend) {
      pipeline::cmd_render(render_scene, pipeline::load_camera(render_camera), parse_pose(render_pose), render_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
