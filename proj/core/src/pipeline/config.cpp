#include "blursplat/pipeline/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "blursplat/error.hpp"

namespace blursplat::pipeline {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  return os.str();
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "dataset", "output", "tau_sharp", "tau_success", "weight_laplacian", "lambda_rgb",
      "lambda_depth", "lambda_sparse", "lambda_reg", "w_sharp", "w_deblur", "w_fail",
      "schedule.factors", "schedule.kernels", "schedule.iterations", "n_sub", "seed_stride",
      "seed", "provider", "scores_file", "endpoints", "fallback", "refine", "bootstrap_frames",
      "force_class", "lr.means", "lr.log_scales", "lr.rotations", "lr.opacity_logits",
      "lr.colors", "lr.exposure", "lr.proposals", "lr.corrections", "lr.endpoints"};
  return keys;
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || trim(t.substr(0, eq)).empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    map.values_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigMap::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ConfigError("override '" + assignment + "' is not key=value");
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects a number, got '" + it->second + "'");
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects an integer, got '" + it->second + "'");
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("key '" + key + "' expects true/false, got '" + it->second + "'");
}

std::vector<long> ConfigMap::get_int_list(const std::string& key, const std::vector<long>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<long> out;
  std::istringstream is(it->second);
  std::string item;
  while (std::getline(is, item, ',')) {
    ConfigMap tmp;
    tmp.set(key, trim(item));
    out.push_back(tmp.get_int(key, 0));
  }
  return out;
}

std::string ConfigMap::dump() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

RunConfig RunConfig::from_map(const ConfigMap& m) {
  for (const auto& [key, value] : m.values()) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c;
  c.dataset = m.get_string("dataset", "");
  c.output = m.get_string("output", "");
  c.thresholds.tau_sharp = m.get_double("tau_sharp", c.thresholds.tau_sharp);
  c.thresholds.tau_success = m.get_double("tau_success", c.thresholds.tau_success);
  c.thresholds.weight_laplacian = m.get_double("weight_laplacian", c.thresholds.weight_laplacian);
  auto& w = c.weights;
  w.lambda_rgb = m.get_double("lambda_rgb", w.lambda_rgb);
  w.lambda_depth = m.get_double("lambda_depth", w.lambda_depth);
  w.lambda_sparse = m.get_double("lambda_sparse", w.lambda_sparse);
  w.lambda_reg = m.get_double("lambda_reg", w.lambda_reg);
  w.w_sharp = m.get_double("w_sharp", w.w_sharp);
  w.w_deblur = m.get_double("w_deblur", w.w_deblur);
  w.w_fail = m.get_double("w_fail", w.w_fail);
  auto& lr = c.learning_rates;
  lr.means = m.get_double("lr.means", lr.means);
  lr.log_scales = m.get_double("lr.log_scales", lr.log_scales);
  lr.rotations = m.get_double("lr.rotations", lr.rotations);
  lr.opacity_logits = m.get_double("lr.opacity_logits", lr.opacity_logits);
  lr.colors = m.get_double("lr.colors", lr.colors);
  lr.exposure = m.get_double("lr.exposure", lr.exposure);
  lr.proposals = m.get_double("lr.proposals", lr.proposals);
  lr.corrections = m.get_double("lr.corrections", lr.corrections);
  lr.endpoints = m.get_double("lr.endpoints", lr.endpoints);

  const auto factors = m.get_int_list("schedule.factors", {4, 2, 1});
  const auto kernels = m.get_int_list("schedule.kernels", {3, 5, 9});
  const long iterations = m.get_int("schedule.iterations", 200);
  if (factors.size() != kernels.size())
    throw ConfigError("schedule.factors and schedule.kernels differ in length");
  c.schedule.clear();
  for (std::size_t i = 0; i < factors.size(); ++i)
    c.schedule.push_back({static_cast<int>(factors[i]), static_cast<int>(kernels[i]), static_cast<int>(iterations)});

  c.n_sub = static_cast<int>(m.get_int("n_sub", c.n_sub));
  c.seed_stride = static_cast<int>(m.get_int("seed_stride", c.seed_stride));
  c.seed = static_cast<unsigned long>(m.get_int("seed", 0));
  c.provider = m.get_string("provider", c.provider);
  c.scores_file = m.get_string("scores_file", "");
  c.endpoints = m.get_string("endpoints", c.endpoints);
  c.fallback = m.get_bool("fallback", c.fallback);
  c.refine = m.get_bool("refine", c.refine);
  c.bootstrap_frames = static_cast<int>(m.get_int("bootstrap_frames", c.bootstrap_frames));
  const std::string forced = m.get_string("force_class", "");
  if (!forced.empty()) {
    try {
      c.force_class = detect::parse_frame_class(forced);
    } catch (const IoError&) {
      throw ConfigError("force_class must be sharp, deblurred or fail");
    }
  }
  c.validate();
  return c;
}

ConfigMap RunConfig::to_map() const {
  ConfigMap m;
  m.set("dataset", dataset.string());
  m.set("output", output.string());
  m.set("tau_sharp", format_double(thresholds.tau_sharp));
  m.set("tau_success", format_double(thresholds.tau_success));
  m.set("weight_laplacian", format_double(thresholds.weight_laplacian));
  m.set("lambda_rgb", format_double(weights.lambda_rgb));
  m.set("lambda_depth", format_double(weights.lambda_depth));
  m.set("lambda_sparse", format_double(weights.lambda_sparse));
  m.set("lambda_reg", format_double(weights.lambda_reg));
  m.set("w_sharp", format_double(weights.w_sharp));
  m.set("w_deblur", format_double(weights.w_deblur));
  m.set("w_fail", format_double(weights.w_fail));
  m.set("lr.means", format_double(learning_rates.means));
  m.set("lr.log_scales", format_double(learning_rates.log_scales));
  m.set("lr.rotations", format_double(learning_rates.rotations));
  m.set("lr.opacity_logits", format_double(learning_rates.opacity_logits));
  m.set("lr.colors", format_double(learning_rates.colors));
  m.set("lr.exposure", format_double(learning_rates.exposure));
  m.set("lr.proposals", format_double(learning_rates.proposals));
  m.set("lr.corrections", format_double(learning_rates.corrections));
  m.set("lr.endpoints", format_double(learning_rates.endpoints));
  std::vector<int> factors, kernels;
  for (const auto& l : schedule) {
    factors.push_back(l.factor);
    kernels.push_back(l.kernel_size);
  }
  m.set("schedule.factors", join(factors));
  m.set("schedule.kernels", join(kernels));
  m.set("schedule.iterations", std::to_string(schedule.empty() ? 0 : schedule.front().iterations));
  m.set("n_sub", std::to_string(n_sub));
  m.set("seed_stride", std::to_string(seed_stride));
  m.set("seed", std::to_string(seed));
  m.set("provider", provider);
  m.set("scores_file", scores_file.string());
  m.set("endpoints", endpoints);
  m.set("fallback", fallback ? "true" : "false");
  m.set("refine", refine ? "true" : "false");
  m.set("bootstrap_frames", std::to_string(bootstrap_frames));
  m.set("force_class", force_class ? detect::to_string(*force_class) : "");
  return m;
}

void RunConfig::validate() const {
  weights.validate();
  if (n_sub < 1) throw ConfigError("n_sub must be >= 1");
  if (seed_stride < 1) throw ConfigError("seed_stride must be >= 1");
  if (bootstrap_frames < 0) throw ConfigError("bootstrap_frames must be >= 0");
  if (schedule.empty()) throw ConfigError("schedule must have at least one level");
  for (const auto& l : schedule) {
    if (l.factor < 1) throw ConfigError("schedule factors must be >= 1");
    if (l.kernel_size < 1 || l.kernel_size % 2 == 0) throw ConfigError("schedule kernel sizes must be odd");
    if (l.iterations < 0) throw ConfigError("schedule.iterations must be >= 0");
  }
  if (provider != "oracle" && provider != "external-scores")
    throw ConfigError("provider must be 'oracle' or 'external-scores'");
  if (provider == "external-scores" && scores_file.empty())
    throw ConfigError("provider 'external-scores' needs scores_file");
  if (endpoints != "oracle" && endpoints != "tracker")
    throw ConfigError("endpoints must be 'oracle' or 'tracker'");
  const auto& lr = learning_rates;
  for (double v : {lr.means, lr.log_scales, lr.rotations, lr.opacity_logits, lr.colors, lr.exposure,
                   lr.proposals, lr.corrections, lr.endpoints}) {
    if (!(v > 0.0)) throw ConfigError("learning rates must be positive");
  }
}

}  // namespace blursplat::pipeline
