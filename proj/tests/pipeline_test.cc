#include "crossres/pipeline.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "crossres/errors.h"
#include "crossres/synth.h"

namespace crossres::pipeline {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, DefaultsValidate) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.fusion.size(), 4u);
  EXPECT_EQ(c.header().rfind("# crossres 1.0.0 config=", 0), 0u);
}

TEST(Config, UnknownKeyAndValues) {
  EXPECT_THROW(RunConfig::from_json({{"colour", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"folds", "five"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"folds", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"seed_mode", "everything"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(nlohmann::json::array()), ConfigError);
}

TEST(Config, UnknownSystemIdIsConfigError) {
  EXPECT_THROW(RunConfig::from_json({{"systems", {{"P_user", {"jw,sideways"}}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"systems", {{"C", {"cnn"}}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"systems", {{"Comm3", {"dp"}}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"fusion", {"P+Q/logit"}}}), ConfigError);
}

TEST(Config, JsonRoundTripAndHash) {
  RunConfig a;
  a.seed = 17;
  a.systems["P_user"] = {"jw,nonorm,nolower,bw", "soft-tfidf"};
  const RunConfig b = RunConfig::from_json(a.to_json());
  EXPECT_EQ(b.to_json(), a.to_json());
  EXPECT_EQ(b.hash(), a.hash());
  RunConfig moved = a;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(moved.hash(), a.hash());
  RunConfig changed = a;
  changed.seed = 18;
  EXPECT_NE(changed.hash(), a.hash());
}

TEST(Config, MissingCorpusIsConfigError) {
  RunConfig c;
  c.twitter_path = "/nonexistent/tw.jsonl";
  c.instagram_path = "/nonexistent/ig.jsonl";
  EXPECT_THROW(c.check_paths(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

class EndToEnd : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("crossres_pipeline_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    synth::SynthParams p;
    p.n_users = 120;
    p.seed = 5;
    const auto corpus = synth::synth_corpus(p);
    std::ofstream tw(dir_ / "twitter.jsonl"), ig(dir_ / "instagram.jsonl");
    write_posts(tw, corpus.twitter);
    write_posts(ig, corpus.instagram);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static RunConfig config(const std::string& out) {
    RunConfig c;
    c.twitter_path = (dir_ / "twitter.jsonl").string();
    c.instagram_path = (dir_ / "instagram.jsonl").string();
    c.output_dir = (dir_ / out).string();
    c.negatives_per_true = 5;
    c.trees = 20;
    c.systems["P_user"] = {"jw,norm,lower,nobw", "jw,norm,lower,bw"};
    return c;
  }

  static fs::path dir_;
};

fs::path EndToEnd::dir_;

TEST_F(EndToEnd, ReportHasOneRowPerSystem) {
  const auto c = config("run1");
  run_pipeline(c);
  const std::string report = slurp(fs::path(c.output_dir) / "report.tsv");
  std::istringstream lines(report);
  std::string line;
  size_t rows = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, c.header());
  std::getline(lines, line);  // column header
  while (std::getline(lines, line)) ++rows;
  // 8 feature systems + 4 fusion systems.
  EXPECT_EQ(rows, 12u);
  EXPECT_NE(report.find("Fusion\tP+C+N1+N2/random_forest"), std::string::npos);
  for (const char* name : {"trials.tsv", "scores.tsv", "system_scores.tsv", "fused.tsv", "aligned_edges.tsv",
                           "aligned_vertices.tsv", "warnings.txt"}) {
    const std::string text = slurp(fs::path(c.output_dir) / name);
    EXPECT_EQ(text.rfind(c.header(), 0), 0u) << name;
  }
  EXPECT_FALSE(fs::is_empty(fs::path(c.output_dir) / "det"));
}

TEST_F(EndToEnd, RerunIsByteIdentical) {
  const auto a = config("rerun_a");
  auto b = config("rerun_b");
  run_pipeline(a);
  run_pipeline(b);
  for (const char* name : {"report.tsv", "scores.tsv", "fused.tsv", "trials.tsv"})
    EXPECT_EQ(slurp(fs::path(a.output_dir) / name), slurp(fs::path(b.output_dir) / name)) << name;
}

TEST_F(EndToEnd, ScoreSheetRoundTrip) {
  const auto c = config("sheet");
  const auto corpora = load_corpora(c);
  const auto graphs = build_graphs(corpora, c);
  const auto trials = make_trials(corpora, c);
  std::vector<std::string> warnings;
  const auto systems = score_features(corpora, graphs, trials, c, &warnings);
  std::stringstream ss;
  ss << c.header() << '\n';
  write_score_sheet(ss, trials, systems);
  std::vector<eval::Trial> trials_back;
  std::vector<SystemScores> systems_back;
  read_score_sheet(ss, trials_back, systems_back);
  ASSERT_EQ(trials_back.size(), trials.size());
  ASSERT_EQ(systems_back.size(), systems.size());
  for (size_t s = 0; s < systems.size(); ++s) EXPECT_EQ(systems_back[s].scores, systems[s].scores);
  for (size_t i = 0; i < trials.size(); ++i) EXPECT_EQ(trials_back[i].fold, trials[i].fold);
}

TEST_F(EndToEnd, StageErrorsNameTheStage) {
  auto c = config("broken");
  std::ofstream(dir_ / "empty.jsonl") << "# nothing\n";
  c.instagram_path = (dir_ / "empty.jsonl").string();
  try {
    run_pipeline(c);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(std::string(e.what()).rfind("stage ", 0), 0u) << e.what();
  }
}

}  // namespace
}  // namespace crossres::pipeline
