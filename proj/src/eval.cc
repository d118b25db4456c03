#include "crossres/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "crossres/errors.h"
#include "crossres/random.h"

namespace crossres::eval {

bool is_nontrivial(const std::string& twitter_username, const std::string& instagram_username) {
  return twitter_username != instagram_username;
}

std::vector<Trial> build_trials(const std::vector<LinkedPair>& links, const std::vector<UserRef>& instagram_pool,
                                size_t negatives_per_true, uint64_t seed) {
  if (links.empty()) throw DataError("no truth links: cannot build trials");
  Rng rng(seed);
  std::vector<Trial> trials;
  trials.reserve(links.size() * (negatives_per_true + 1));
  size_t counter = 0;
  auto next_id = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%07zu", counter++);
    return std::string(buf);
  };
  for (size_t g = 0; g < links.size(); ++g) {
    const auto& link = links[g];
    std::vector<size_t> candidates;
    for (size_t p = 0; p < instagram_pool.size(); ++p)
      if (instagram_pool[p].id != link.instagram.id) candidates.push_back(p);
    if (candidates.size() < negatives_per_true)
      throw DataError("instagram pool has " + std::to_string(candidates.size()) + " candidates, " +
                      std::to_string(negatives_per_true) + " negatives requested");

    trials.push_back({next_id(), link.twitter.id, link.instagram.id, link.twitter.username,
                      link.instagram.username, true,
                      is_nontrivial(link.twitter.username, link.instagram.username), g, -1});
    // Partial Fisher-Yates: the first negatives_per_true slots are the sample.
    for (size_t k = 0; k < negatives_per_true; ++k) {
      const size_t j = k + static_cast<size_t>(rng.below(candidates.size() - k));
      std::swap(candidates[k], candidates[j]);
      const auto& neg = instagram_pool[candidates[k]];
      trials.push_back({next_id(), link.twitter.id, neg.id, link.twitter.username, neg.username, false,
                        is_nontrivial(link.twitter.username, neg.username), g, -1});
    }
  }
  return trials;
}

std::vector<Fold> kfold_split(std::vector<Trial>& trials, size_t k, uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold split needs k >= 2");
  size_t groups = 0;
  for (const auto& t : trials) groups = std::max(groups, t.group + 1);
  size_t true_trials = 0;
  for (const auto& t : trials) true_trials += t.label ? 1 : 0;
  if (true_trials < k || groups < k)
    throw DataError("fewer true trials (" + std::to_string(true_trials) + ") than folds (" + std::to_string(k) + ")");

  std::vector<size_t> order(groups);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<size_t>(order));
  std::vector<int> fold_of_group(groups);
  for (size_t pos = 0; pos < groups; ++pos) fold_of_group[order[pos]] = static_cast<int>(pos % k);

  std::vector<Fold> folds(k);
  for (size_t i = 0; i < trials.size(); ++i) {
    const int f = fold_of_group[trials[i].group];
    trials[i].fold = f;
    for (size_t j = 0; j < k; ++j) (static_cast<int>(j) == f ? folds[j].test : folds[j].train).push_back(i);
  }
  return folds;
}

std::vector<Trial> filter_nontrivial(const std::vector<Trial>& trials) {
  std::vector<Trial> out;
  std::copy_if(trials.begin(), trials.end(), std::back_inserter(out), [](const Trial& t) { return t.nontrivial; });
  return out;
}

DetCurve sweep_det(std::span<const double> target_scores, std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw DataError("DET sweep needs at least one target and one non-target score");
  std::vector<double> tgt(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());
  std::vector<double> thresholds;
  thresholds.reserve(tgt.size() + non.size());
  std::merge(tgt.begin(), tgt.end(), non.begin(), non.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  DetCurve curve;
  curve.targets = tgt.size();
  curve.nontargets = non.size();
  const double nt = static_cast<double>(tgt.size());
  const double nn = static_cast<double>(non.size());
  curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  size_t below_t = 0, below_n = 0;  // scores strictly below the threshold
  for (double t : thresholds) {
    while (below_t < tgt.size() && tgt[below_t] < t) ++below_t;
    while (below_n < non.size() && non[below_n] < t) ++below_n;
    curve.points.push_back({t, static_cast<double>(non.size() - below_n) / nn, static_cast<double>(below_t) / nt});
  }
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return curve;
}

ScoredSet split_scores(std::span<const std::optional<double>> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw DataError("score/label count mismatch");
  ScoredSet out;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) {
      ++out.missing;
      continue;
    }
    (labels[i] ? out.targets : out.nontargets).push_back(*scores[i]);
  }
  return out;
}

Eer compute_eer(const DetCurve& curve) {
  const auto& p = curve.points;
  for (const auto& pt : p)
    if (pt.p_miss == pt.p_fa) return {pt.p_miss, false};
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    const double d0 = p[i].p_miss - p[i].p_fa;
    const double d1 = p[i + 1].p_miss - p[i + 1].p_fa;
    if (d0 < 0 && d1 > 0) {
      if (curve.targets > 0 && curve.nontargets > 0) {
        // Swept curves hold count ratios, so the crossing is one rational
        // number and a single rounding makes it exact.
        const auto nt = static_cast<int64_t>(curve.targets), nn = static_cast<int64_t>(curve.nontargets);
        const int64_t m0 = std::llround(p[i].p_miss * nt), m1 = std::llround(p[i + 1].p_miss * nt);
        const int64_t f0 = std::llround(p[i].p_fa * nn), f1 = std::llround(p[i + 1].p_fa * nn);
        const int64_t num = f0 * (m1 - m0) - m0 * (f1 - f0);
        const int64_t den = (m1 - m0) * nn - (f1 - f0) * nt;
        return {static_cast<double>(num) / static_cast<double>(den), true};
      }
      const double t = -d0 / (d1 - d0);
      return {p[i].p_fa + t * (p[i + 1].p_fa - p[i].p_fa), true};
    }
  }
  return {0.5, true};  // unreachable for a curve produced by sweep_det
}

EvalReportRow evaluate(std::string feature, std::string system, std::span<const std::optional<double>> scores,
                       const std::vector<Trial>& trials) {
  if (scores.size() != trials.size()) throw DataError("score/trial count mismatch");
  EvalReportRow row;
  row.feature = std::move(feature);
  row.system = std::move(system);
  for (int pass = 0; pass < 2; ++pass) {
    const bool nt_only = pass == 1;
    std::vector<std::optional<double>> s;
    std::vector<bool> labels;
    for (size_t i = 0; i < trials.size(); ++i) {
      if (nt_only && !trials[i].nontrivial) continue;
      s.push_back(scores[i]);
      labels.push_back(trials[i].label);
    }
    const ScoredSet set = split_scores(s, labels);
    std::optional<Eer> eer;
    if (!set.targets.empty() && !set.nontargets.empty()) eer = compute_eer(sweep_det(set.targets, set.nontargets));
    (nt_only ? row.eer_nt : row.eer_all) = eer;
    (nt_only ? row.trials_nt : row.trials_all) = s.size();
    (nt_only ? row.missing_nt : row.missing_all) = set.missing;
  }
  return row;
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_pct(const std::optional<Eer>& e) {
  if (!e) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * e->value);
  return buf;
}

}  // namespace

void write_det_csv(std::ostream& out, const DetCurve& curve) {
  out << "threshold,p_fa,p_miss\n";
  for (const auto& p : curve.points)
    out << format_double(p.threshold) << ',' << format_double(p.p_fa) << ',' << format_double(p.p_miss) << '\n';
}

void write_report_tsv(std::ostream& out, const std::vector<EvalReportRow>& rows) {
  out << "feature\tsystem\teer_all_pct\teer_nt_pct\tinterp_all\tinterp_nt\ttrials_all\ttrials_nt\tmissing_all\t"
         "missing_nt\n";
  for (const auto& r : rows) {
    out << r.feature << '\t' << r.system << '\t' << format_pct(r.eer_all) << '\t' << format_pct(r.eer_nt) << '\t'
        << (r.eer_all ? (r.eer_all->interpolated ? "1" : "0") : "NA") << '\t'
        << (r.eer_nt ? (r.eer_nt->interpolated ? "1" : "0") : "NA") << '\t' << r.trials_all << '\t' << r.trials_nt
        << '\t' << r.missing_all << '\t' << r.missing_nt << '\n';
  }
}

}  // namespace crossres::eval
