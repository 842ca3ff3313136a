#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blursplat/detect/classifier.hpp"
#include "blursplat/mapping/mapper.hpp"

namespace blursplat::pipeline {

/// Flat "key = value" settings; '#' starts a comment line.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text, const std::string& origin = "<text>");
  static ConfigMap load(const std::filesystem::path& path);

  /// Applies a "key=value" override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;

  /// Sorted "key = value" lines.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Default thresholds for the builtin "lapvar" metric, calibrated on the
/// synthetic reference benchmark (see `blursplat bench-metrics`).
inline constexpr double kDefaultTauSharp = -7.52861e-4;
inline constexpr double kDefaultTauSuccess = 0.679678;
inline constexpr double kDefaultWeightLaplacian = 0.5;

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path output;
  detect::ClassifierThresholds thresholds{kDefaultTauSharp, kDefaultTauSuccess, kDefaultWeightLaplacian};
  mapping::LossWeights weights;
  mapping::LearningRates learning_rates;
  std::vector<mapping::ScaleLevel> schedule = mapping::default_schedule();
  int n_sub = 3;
  int seed_stride = 8;
  unsigned long seed = 0;
  std::string provider = "oracle";   // oracle | external-scores
  std::filesystem::path scores_file; // for external-scores
  std::string endpoints = "oracle";  // oracle | tracker
  bool fallback = true;              // false drops Fail frames from mapping
  bool refine = true;
  int bootstrap_frames = 2;          // frames always handed to the tracker
  std::optional<detect::FrameClass> force_class;

  /// Throws ConfigError on unknown keys or invalid values.
  static RunConfig from_map(const ConfigMap& map);
  ConfigMap to_map() const;
  void validate() const;
};

}  // namespace blursplat::pipeline
