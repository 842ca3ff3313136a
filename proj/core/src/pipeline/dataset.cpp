#include "blursplat/pipeline/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "blursplat/error.hpp"
#include "blursplat/imaging/raster_io.hpp"
#include "blursplat/pipeline/config.hpp"
#include "blursplat/synth/blur_synth.hpp"

namespace blursplat::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string item;
  while (std::getline(is, item, '\t')) out.push_back(item);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

void write_pose(std::ostream& os, const geometry::SE3Pose& p) {
  const auto& t = p.translation();
  const auto& q = p.quaternion();
  os << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q(1) << ' ' << q(2) << ' ' << q(3) << ' ' << q(0);
}

geometry::SE3Pose read_pose(std::istream& is) {
  double tx, ty, tz, qx, qy, qz, qw;
  is >> tx >> ty >> tz >> qx >> qy >> qz >> qw;
  if (is.fail()) throw IoError("expected 7 pose values");
  return {geometry::Vec4(qw, qx, qy, qz), geometry::Vec3(tx, ty, tz)};
}

std::string frame_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d", i);
  return buf;
}

}  // namespace

std::string planned_class_name(char code) {
  switch (code) {
    case 'S': return "sharp";
    case 'D': return "deblurred";
    case 'F': return "fail";
    default: throw ConfigError(std::string("unknown plan code '") + code + "' (expected S, D or F)");
  }
}

void save_manifest(const fs::path& path, const std::vector<ManifestRow>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "frame\ttimestamp\tplanned\tn_averaged\tblurred\tsharp\tdepth\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.frame << '\t' << r.timestamp << '\t' << r.planned << '\t' << r.n_averaged << '\t'
       << r.blurred << '\t' << r.sharp << '\t' << r.depth << '\n';
  }
}

std::vector<ManifestRow> load_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<ManifestRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line_no == 1 || line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 7) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 7 fields");
    ManifestRow r;
    try {
      r.frame = std::stoi(f[0]);
      r.timestamp = std::stod(f[1]);
      r.n_averaged = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    r.planned = f[2];
    r.blurred = f[4];
    r.sharp = f[5];
    r.depth = f[6];
    rows.push_back(r);
  }
  return rows;
}

void save_exposure_windows(const fs::path& path, const std::vector<ExposureWindow>& windows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "# frame  start: tx ty tz qx qy qz qw  end: tx ty tz qx qy qz qw\n" << std::setprecision(17);
  for (const auto& w : windows) {
    os << w.frame << ' ';
    write_pose(os, w.start);
    os << ' ';
    write_pose(os, w.end);
    os << '\n';
  }
}

std::vector<ExposureWindow> load_exposure_windows(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<ExposureWindow> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ExposureWindow w;
    ls >> w.frame;
    try {
      w.start = read_pose(ls);
      w.end = read_pose(ls);
    } catch (const Error& e) {
      throw IoError(path.string() + ": " + e.what());
    }
    out.push_back(w);
  }
  return out;
}

void save_camera(const fs::path& path, const Camera& cam) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17) << "width = " << cam.width << "\nheight = " << cam.height
     << "\nfx = " << cam.fx << "\nfy = " << cam.fy << "\ncx = " << cam.cx << "\ncy = " << cam.cy << '\n';
}

Camera load_camera(const fs::path& path) {
  const ConfigMap m = ConfigMap::load(path);
  Camera cam;
  cam.width = static_cast<int>(m.get_int("width", 0));
  cam.height = static_cast<int>(m.get_int("height", 0));
  cam.fx = m.get_double("fx", 0.0);
  cam.fy = m.get_double("fy", 0.0);
  cam.cx = m.get_double("cx", (cam.width - 1) / 2.0);
  cam.cy = m.get_double("cy", (cam.height - 1) / 2.0);
  try {
    cam.validate();
  } catch (const ContractError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cam;
}

Dataset Dataset::load(const fs::path& root) {
  Dataset d;
  d.root = root;
  d.camera = load_camera(root / "dataset.cfg");
  d.rows = load_manifest(root / "manifest.tsv");
  if (fs::exists(root / "trajectory_gt.txt")) d.ground_truth = tracking::load_tum(root / "trajectory_gt.txt");
  if (fs::exists(root / "exposure_gt.txt")) {
    for (const auto& w : load_exposure_windows(root / "exposure_gt.txt")) d.exposures[w.frame] = w;
  }
  return d;
}

Image Dataset::blurred(std::size_t i) const { return imaging::read_png(root / rows.at(i).blurred); }

std::optional<Image> Dataset::sharp(std::size_t i) const {
  const auto& r = rows.at(i);
  if (r.sharp.empty() || !fs::exists(root / r.sharp)) return std::nullopt;
  return imaging::read_png(root / r.sharp);
}

std::optional<Image> Dataset::depth(std::size_t i) const {
  const auto& r = rows.at(i);
  if (r.depth.empty() || !fs::exists(root / r.depth)) return std::nullopt;
  return imaging::read_pfm(root / r.depth);
}

std::optional<geometry::SE3Pose> Dataset::gt_pose(std::size_t i) const {
  const double ts = rows.at(i).timestamp;
  for (const auto& p : ground_truth) {
    if (std::abs(p.timestamp - ts) <= 1e-9) return p.pose;
  }
  return std::nullopt;
}

SynthSummary synthesize_dataset(const SynthOptions& opt) {
  if (opt.window < 1) throw ConfigError("window must be >= 1");
  const fs::path frames_dir = opt.frames_dir / "frames";
  if (!fs::is_directory(frames_dir)) throw IoError("missing source directory " + frames_dir.string());
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    if (entry.path().extension() == ".png") sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());
  const int windows = static_cast<int>(sources.size()) / opt.window;
  if (windows == 0) throw IoError("fewer source frames than one window in " + frames_dir.string());
  std::string plan = opt.plan;
  if (plan.empty()) plan.assign(static_cast<std::size_t>(windows), opt.window == 1 ? 'S' : 'D');
  if (plan.size() != static_cast<std::size_t>(windows))
    throw ConfigError("plan has " + std::to_string(plan.size()) + " entries for " +
                      std::to_string(windows) + " windows");
  for (char c : plan) planned_class_name(c);

  Trajectory source_traj;
  if (fs::exists(opt.frames_dir / "trajectory.txt")) {
    source_traj = tracking::load_tum(opt.frames_dir / "trajectory.txt");
    if (source_traj.size() != sources.size())
      throw IoError("trajectory.txt has " + std::to_string(source_traj.size()) + " poses for " +
                    std::to_string(sources.size()) + " frames");
  }

  // Read everything first so every unreadable file is reported at once.
  std::vector<Image> images(sources.size());
  std::vector<std::optional<Image>> depths(sources.size());
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      images[i] = imaging::read_png(sources[i]);
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
    const fs::path dp = opt.frames_dir / "depth" / (sources[i].stem().string() + ".pfm");
    if (fs::exists(dp)) {
      try {
        depths[i] = imaging::read_pfm(dp);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (!errors.empty()) {
    std::string msg = "unreadable source files:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw IoError(msg);
  }

  Camera cam;
  if (fs::exists(opt.frames_dir / "camera.cfg")) {
    cam = load_camera(opt.frames_dir / "camera.cfg");
  } else {
    cam.width = images.front().width();
    cam.height = images.front().height();
    cam.fx = cam.fy = cam.width;
    cam.cx = (cam.width - 1) / 2.0;
    cam.cy = (cam.height - 1) / 2.0;
  }

  fs::create_directories(opt.out_dir / "blurred");
  fs::create_directories(opt.out_dir / "sharp");
  fs::create_directories(opt.out_dir / "depth");
  std::vector<ManifestRow> rows;
  Trajectory gt;
  std::vector<ExposureWindow> exposures;
  for (int w = 0; w < windows; ++w) {
    const std::size_t first = static_cast<std::size_t>(w) * opt.window;
    synth::FrameSequence seq;
    seq.frames.assign(images.begin() + static_cast<std::ptrdiff_t>(first),
                      images.begin() + static_cast<std::ptrdiff_t>(first + opt.window));
    const synth::BenchmarkPair pair = synth::make_benchmark_pair(seq, opt.window);
    const std::size_t mid = first + static_cast<std::size_t>(pair.mid_index);

    ManifestRow r;
    r.frame = w;
    r.timestamp = source_traj.empty() ? static_cast<double>(w) : source_traj[mid].timestamp;
    r.planned = planned_class_name(plan[static_cast<std::size_t>(w)]);
    r.n_averaged = opt.window;
    r.blurred = "blurred/" + frame_name(w) + ".png";
    r.sharp = "sharp/" + frame_name(w) + ".png";
    imaging::write_png(opt.out_dir / r.blurred, pair.blurred);
    imaging::write_png(opt.out_dir / r.sharp, pair.sharp);
    if (depths[mid]) {
      r.depth = "depth/" + frame_name(w) + ".pfm";
      imaging::write_pfm(opt.out_dir / r.depth, *depths[mid]);
    }
    rows.push_back(r);
    if (!source_traj.empty()) {
      gt.push_back({r.timestamp, source_traj[mid].pose});
      exposures.push_back({w, source_traj[first].pose, source_traj[first + opt.window - 1].pose});
    }
  }
  save_manifest(opt.out_dir / "manifest.tsv", rows);
  save_camera(opt.out_dir / "dataset.cfg", cam);
  if (!gt.empty()) {
    tracking::save_tum(opt.out_dir / "trajectory_gt.txt", gt);
    save_exposure_windows(opt.out_dir / "exposure_gt.txt", exposures);
  }
  return {windows, static_cast<int>(sources.size())};
}

}  // namespace blursplat::pipeline
