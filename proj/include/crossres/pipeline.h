#ifndef CROSSRES_PIPELINE_H_
#define CROSSRES_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossres/content.h"
#include "crossres/corpus.h"
#include "crossres/eval.h"
#include "crossres/fusion.h"
#include "crossres/graph.h"
#include "json.hpp"

namespace crossres::pipeline {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct FusionSystem {
  std::string bundles;  // e.g. "P+C+N1+N2"
  fusion::ModelKind kind = fusion::ModelKind::random_forest;

  std::string name() const;  // "P+C+N1+N2/random_forest"
};

struct RunConfig {
  std::string twitter_path;
  std::string instagram_path;
  std::string output_dir = "crossres_out";
  graph::SeedMode seed_mode = graph::SeedMode::hashtags_and_usernames;
  // Systems per feature column; the first one of each feeds fusion.
  std::map<std::string, std::vector<std::string>> systems;
  std::vector<FusionSystem> fusion;
  size_t negatives_per_true = 10;
  size_t folds = 5;
  uint64_t seed = 1;
  int64_t min_words = content::kDefaultMinWords;
  size_t min_mask_rows = 20;
  double svm_c = 1.0;
  double logit_l2 = 1e-3;
  size_t trees = 100;
  size_t max_depth = 8;
  graph::TwoHopScope community_two_hop = graph::TwoHopScope::ball;
  graph::TwoHopScope neighborhood_two_hop = graph::TwoHopScope::ring;

  RunConfig();  // default systems and fusion list

  // Unknown keys, bad values and unknown system ids raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  // Throws ConfigError when an input corpus does not exist.
  void check_paths() const;
  // FNV-1a of the canonical JSON without output_dir.
  std::string hash() const;
  // "# crossres <version> config=<hash>"
  std::string header() const;
};

RunConfig load_config(const std::string& path);

// Everything derived from the two corpora before scoring.
struct Corpora {
  std::vector<Post> twitter;
  std::vector<Post> instagram;
  std::map<std::string, UserProfile> twitter_profiles;
  std::map<std::string, UserProfile> instagram_profiles;
  std::vector<std::string> warnings;
};

Corpora load_corpora(const RunConfig& config);

struct GraphStage {
  graph::DomainGraph twitter;
  graph::DomainGraph instagram;
  graph::SeedSet seeds;
  graph::AlignedGraph aligned;
};

GraphStage build_graphs(const Corpora& corpora, const RunConfig& config);

std::vector<eval::Trial> make_trials(const Corpora& corpora, const RunConfig& config);

// Scores of one system for every trial, in trial order.
struct SystemScores {
  std::string feature;  // column name, e.g. "P_user"
  std::string system;
  std::vector<std::optional<double>> scores;
};

// All configured feature systems, feature columns in table order.
std::vector<SystemScores> score_features(const Corpora& corpora, const GraphStage& graphs,
                                         const std::vector<eval::Trial>& trials, const RunConfig& config,
                                         std::vector<std::string>* warnings);

fusion::ScoreTable fusion_table(const std::vector<eval::Trial>& trials, const std::vector<SystemScores>& systems,
                                const RunConfig& config);

struct FusedSystem {
  std::string name;
  std::vector<std::optional<double>> scores;
  std::vector<std::optional<fusion::Mask>> masks;
};

// Per fold: trains on the other folds' rows and scores the held-out rows.
std::vector<FusedSystem> fuse(const fusion::ScoreTable& table, const RunConfig& config,
                              std::vector<std::string>* warnings);

std::vector<eval::EvalReportRow> evaluate_all(const std::vector<eval::Trial>& trials,
                                              const std::vector<SystemScores>& systems);

// Wide score sheet: trial metadata followed by one "<feature>:<system>"
// column per system.
void write_score_sheet(std::ostream& out, const std::vector<eval::Trial>& trials,
                       const std::vector<SystemScores>& systems);
void read_score_sheet(std::istream& in, std::vector<eval::Trial>& trials, std::vector<SystemScores>& systems);

void write_trials_tsv(std::ostream& out, const std::vector<eval::Trial>& trials);

// Writes report.tsv and det/*.csv for the given systems under dir.
void write_evaluation(const std::string& dir, const RunConfig& config, const std::vector<eval::Trial>& trials,
                      const std::vector<SystemScores>& systems);

// Runs every stage and writes trials.tsv, graph snapshots, scores.tsv,
// system_scores.tsv, fused.tsv, report.tsv, det/*.csv and warnings.txt.
// Stage failures are rethrown with the stage name prepended.
void run_pipeline(const RunConfig& config);

}  // namespace crossres::pipeline

#endif  // CROSSRES_PIPELINE_H_
