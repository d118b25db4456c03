#ifndef CROSSRES_TESTS_EER_ORACLE_H_
#define CROSSRES_TESTS_EER_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace crossres::testing {

// Independent EER: counts misses and false alarms at every candidate
// threshold by brute force, returns |P_m - P_fa|'s zero if one is hit,
// otherwise the straight-line crossing between the bracketing thresholds.
inline double brute_force_eer(const std::vector<double>& targets, const std::vector<double>& nontargets) {
  std::vector<double> thresholds{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  thresholds.insert(thresholds.end(), targets.begin(), targets.end());
  thresholds.insert(thresholds.end(), nontargets.begin(), nontargets.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  struct P {
    double fa, miss;
  };
  std::vector<P> points;
  for (double t : thresholds) {
    double miss = 0, fa = 0;
    for (double s : targets) miss += s < t;
    for (double s : nontargets) fa += s >= t;
    points.push_back({fa / nontargets.size(), miss / targets.size()});
  }
  double best = 2;
  double value = 0.5;
  for (const auto& p : points)
    if (std::abs(p.miss - p.fa) < best) best = std::abs(p.miss - p.fa), value = p.miss;
  if (best == 0) return value;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const double d0 = points[i].miss - points[i].fa;
    const double d1 = points[i + 1].miss - points[i + 1].fa;
    if (d0 < 0 && d1 > 0) return points[i].fa + (points[i + 1].fa - points[i].fa) * (-d0 / (d1 - d0));
  }
  return value;
}

}  // namespace crossres::testing

#endif  // CROSSRES_TESTS_EER_ORACLE_H_
