#ifndef CROSSRES_EVAL_H_
#define CROSSRES_EVAL_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crossres::eval {

struct UserRef {
  std::string id;
  std::string username;
};

struct Trial {
  std::string id;
  std::string twitter_user;
  std::string instagram_user;
  std::string twitter_username;
  std::string instagram_username;
  bool label = false;
  bool nontrivial = true;
  size_t group = 0;  // index of the true trial this trial was built from
  int fold = -1;
};

struct LinkedPair {
  UserRef twitter;
  UserRef instagram;
};

// Usernames differ under exact, case-sensitive comparison.
bool is_nontrivial(const std::string& twitter_username, const std::string& instagram_username);

// One true trial per link followed by negatives_per_true false trials whose
// Instagram side is drawn without replacement from the pool (never the
// linked account). Throws DataError when the pool is too small or there are
// no links.
std::vector<Trial> build_trials(const std::vector<LinkedPair>& links, const std::vector<UserRef>& instagram_pool,
                                size_t negatives_per_true, uint64_t seed);

struct Fold {
  std::vector<size_t> train;  // trial indices
  std::vector<size_t> test;
};

// Splits by trial group so a true trial and its false trials share a fold.
// Also writes the fold number into each trial. Throws DataError when there
// are fewer groups than folds and ConfigError when k < 2.
std::vector<Fold> kfold_split(std::vector<Trial>& trials, size_t k, uint64_t seed);

std::vector<Trial> filter_nontrivial(const std::vector<Trial>& trials);

struct DetPoint {
  double threshold;
  double p_fa;
  double p_miss;
};

// Sorted by ascending threshold, starting at -inf and ending at +inf.
struct DetCurve {
  std::vector<DetPoint> points;
  size_t targets = 0;
  size_t nontargets = 0;
};

// Miss: target score < T. False alarm: non-target score >= T. Thresholds are
// the distinct scores plus both infinities. Throws DataError if either side
// is empty.
DetCurve sweep_det(std::span<const double> target_scores, std::span<const double> nontarget_scores);

struct ScoredSet {
  std::vector<double> targets;
  std::vector<double> nontargets;
  size_t missing = 0;
};

// Splits present scores by label and counts missing ones.
ScoredSet split_scores(std::span<const std::optional<double>> scores, const std::vector<bool>& labels);

struct Eer {
  double value = 0.5;
  bool interpolated = false;
};

// Exact crossing if some point has P_miss == P_fa, otherwise the linear
// interpolation between the two points where P_miss - P_fa changes sign.
// Curves that carry their trial counts interpolate over the integer counts.
Eer compute_eer(const DetCurve& curve);

struct EvalReportRow {
  std::string feature;
  std::string system;
  std::optional<Eer> eer_all;
  std::optional<Eer> eer_nt;
  size_t trials_all = 0;
  size_t trials_nt = 0;
  size_t missing_all = 0;
  size_t missing_nt = 0;
};

// EER over all trials and over the non-trivial subset, missing scores
// excluded. A side with no targets or no non-targets yields nullopt.
EvalReportRow evaluate(std::string feature, std::string system, std::span<const std::optional<double>> scores,
                       const std::vector<Trial>& trials);

void write_det_csv(std::ostream& out, const DetCurve& curve);
void write_report_tsv(std::ostream& out, const std::vector<EvalReportRow>& rows);

}  // namespace crossres::eval

#endif  // CROSSRES_EVAL_H_
