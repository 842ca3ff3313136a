#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "blursplat/imaging/image.hpp"

namespace blursplat::detect {

using imaging::Image;

enum class Polarity { HigherIsBlurrier, HigherIsSharper };

std::string to_string(Polarity p);
Polarity parse_polarity(const std::string& text);

struct MetricPlugin {
  std::string name;
  Polarity polarity = Polarity::HigherIsBlurrier;
  std::function<double(const Image&)> score;

  /// Maps a raw score onto the higher-is-blurrier axis.
  double normalized(double raw) const { return polarity == Polarity::HigherIsSharper ? -raw : raw; }
};

/// "lapvar": log(1 + laplacian_variance), higher is sharper.
MetricPlugin builtin_sharpness_metric();

/// Externally computed scores keyed by image path.
struct ScoreTable {
  std::string metric_name;
  Polarity polarity = Polarity::HigherIsBlurrier;
  std::map<std::string, double> scores;

  double at(const std::string& key) const;
};

/// TSV with a header line "metric<TAB><name><TAB><polarity>" followed by
/// "path<TAB>score" rows; '#' lines are comments.
ScoreTable load_score_table(const std::filesystem::path& path);
void save_score_table(const std::filesystem::path& path, const ScoreTable& table);

}  // namespace blursplat::detect
