#include "blursplat/detect/scores.hpp"

#include <cmath>

namespace blursplat::detect {

double improvement_score(const PairScores& ps) {
  if (ps.pairs.empty()) throw ContractError("improvement_score needs at least one pair");
  double sum = 0.0;
  for (const ScorePair& p : ps.pairs) sum += std::abs(p.sharp - p.blur);
  return sum / static_cast<double>(ps.pairs.size());
}

double cohens_d(const PairScores& ps) {
  const std::size_t m = ps.pairs.size();
  if (m < 2) throw ContractError("cohens_d needs at least two pairs");
  double mean = 0.0;
  for (const ScorePair& p : ps.pairs) mean += p.sharp - p.blur;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (const ScorePair& p : ps.pairs) {
    const double d = (p.sharp - p.blur) - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sigma > 0.0)) throw DegenerateVarianceError();
  return improvement_score(ps) / sigma;
}

double ranking_accuracy(const PairScores& ps) {
  if (ps.pairs.empty()) throw ContractError("ranking_accuracy needs at least one pair");
  std::size_t correct = 0;
  for (const ScorePair& p : ps.pairs) {
    const bool ok = ps.polarity == Polarity::HigherIsBlurrier ? p.blur > p.sharp : p.blur < p.sharp;
    if (ok) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(ps.pairs.size());
}

double consistency_score(double accuracy_percent, double effect_size) {
  if (!(accuracy_percent >= 0.0 && accuracy_percent <= 100.0))
    throw ContractError("accuracy must lie in [0, 100]");
  return accuracy_percent * std::abs(effect_size) / 100.0;
}

}  // namespace blursplat::detect
