#include "blursplat/detect/metric.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "blursplat/error.hpp"
#include "blursplat/imaging/metrics.hpp"

namespace blursplat::detect {

std::string to_string(Polarity p) {
  return p == Polarity::HigherIsSharper ? "higher_is_sharper" : "higher_is_blurrier";
}

Polarity parse_polarity(const std::string& text) {
  if (text == "higher_is_sharper") return Polarity::HigherIsSharper;
  if (text == "higher_is_blurrier") return Polarity::HigherIsBlurrier;
  throw ConfigError("unknown metric polarity '" + text + "'");
}

MetricPlugin builtin_sharpness_metric() {
  return {"lapvar", Polarity::HigherIsSharper,
          [](const Image& img) { return std::log1p(imaging::laplacian_variance(img)); }};
}

double ScoreTable::at(const std::string& key) const {
  const auto it = scores.find(key);
  if (it == scores.end()) throw IoError("no " + metric_name + " score for '" + key + "'");
  return it->second;
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  ScoreTable table;
  bool header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    std::string value;
    if (!std::getline(ls, key, '\t') || !std::getline(ls, value, '\t'))
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected tab-separated fields");
    if (!header) {
      std::string polarity;
      if (key != "metric" || !std::getline(ls, polarity, '\t'))
        throw IoError(path.string() + ": missing 'metric<TAB>name<TAB>polarity' header");
      table.metric_name = value;
      table.polarity = parse_polarity(polarity);
      header = true;
      continue;
    }
    try {
      std::size_t used = 0;
      table.scores[key] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + value + "'");
    }
  }
  if (!header) throw IoError(path.string() + ": empty score table");
  return table;
}

void save_score_table(const std::filesystem::path& path, const ScoreTable& table) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "metric\t" << table.metric_name << '\t' << to_string(table.polarity) << '\n';
  os << std::setprecision(17);
  for (const auto& [key, value] : table.scores) os << key << '\t' << value << '\n';
}

}  // namespace blursplat::detect
