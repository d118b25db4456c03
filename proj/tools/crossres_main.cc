// crossres command line: synthetic corpora, individual pipeline stages and
// the full run. Exit codes: 0 success, 1 data error, 2 config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crossres/content.h"
#include "crossres/corpus.h"
#include "crossres/errors.h"
#include "crossres/fusion.h"
#include "crossres/graph.h"
#include "crossres/pipeline.h"
#include "crossres/synth.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace crossres;

namespace {

// Flags shared by every stage that reads the run configuration.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> twitter, instagram, output_dir, seed_mode;
  std::optional<uint64_t> seed;
  std::optional<size_t> folds, negatives, min_mask_rows, trees, max_depth;
  std::optional<int64_t> min_words;
  std::optional<double> svm_c, logit_l2;
  std::vector<std::string> systems;  // FEATURE=ID
  std::vector<std::string> fusion;   // BUNDLES/KIND

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--twitter", twitter, "Twitter corpus (JSON Lines)");
    app->add_option("--instagram", instagram, "Instagram corpus (JSON Lines)");
    app->add_option("--output-dir", output_dir, "Directory for outputs");
    app->add_option("--seed-mode", seed_mode, "hashtags | hashtags_and_usernames");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--folds", folds, "Cross-validation folds");
    app->add_option("--negatives", negatives, "False trials per true trial");
    app->add_option("--min-words", min_words, "Minimum Twitter words for an author model");
    app->add_option("--min-mask-rows", min_mask_rows, "Minimum rows per fusion mask model");
    app->add_option("--svm-c", svm_c, "SVM cost");
    app->add_option("--logit-l2", logit_l2, "Logistic L2 penalty");
    app->add_option("--trees", trees, "Random forest size");
    app->add_option("--max-depth", max_depth, "Random forest depth");
    app->add_option("--system", systems, "FEATURE=SYSTEM, repeatable; replaces the feature's list");
    app->add_option("--fusion", fusion, "BUNDLES/KIND, repeatable; replaces the fusion list");
  }

  pipeline::RunConfig resolve() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config '" + config_path + "'");
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
    }
    if (twitter) j["twitter"] = *twitter;
    if (instagram) j["instagram"] = *instagram;
    if (output_dir) j["output_dir"] = *output_dir;
    if (seed_mode) j["seed_mode"] = *seed_mode;
    if (seed) j["seed"] = *seed;
    if (folds) j["folds"] = *folds;
    if (negatives) j["negatives_per_true"] = *negatives;
    if (min_words) j["min_words"] = *min_words;
    if (min_mask_rows) j["min_mask_rows"] = *min_mask_rows;
    if (svm_c) j["svm_c"] = *svm_c;
    if (logit_l2) j["logit_l2"] = *logit_l2;
    if (trees) j["trees"] = *trees;
    if (max_depth) j["max_depth"] = *max_depth;
    if (!systems.empty()) {
      std::map<std::string, std::vector<std::string>> overrides;
      for (const auto& s : systems) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--system expects FEATURE=SYSTEM, got '" + s + "'");
        overrides[s.substr(0, eq)].push_back(s.substr(eq + 1));
      }
      nlohmann::json sys = j.contains("systems") ? j["systems"] : pipeline::RunConfig().to_json()["systems"];
      for (const auto& [feature, ids] : overrides) sys[feature] = ids;
      j["systems"] = sys;
    }
    if (!fusion.empty()) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& f : fusion) {
        const auto slash = f.find('/');
        if (slash == std::string::npos) throw ConfigError("--fusion expects BUNDLES/KIND, got '" + f + "'");
        list.push_back({{"bundles", f.substr(0, slash)}, {"kind", f.substr(slash + 1)}});
      }
      j["fusion"] = list;
    }
    return pipeline::RunConfig::from_json(j);
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_synth(const synth::SynthParams& params, const std::string& out_dir) {
  const auto corpus = synth::synth_corpus(params);
  const fs::path root(out_dir);
  fs::create_directories(root);
  {
    auto out = open_out(root / "twitter.jsonl");
    write_posts(out, corpus.twitter);
  }
  {
    auto out = open_out(root / "instagram.jsonl");
    write_posts(out, corpus.instagram);
  }
  {
    auto out = open_out(root / "truth.tsv");
    synth::write_truth_tsv(out, corpus.truth);
  }
  pipeline::RunConfig config;
  config.twitter_path = (root / "twitter.jsonl").string();
  config.instagram_path = (root / "instagram.jsonl").string();
  config.output_dir = (root / "run").string();
  {
    auto out = open_out(root / "config.json");
    out << config.to_json().dump(2) << '\n';
  }
  std::cout << "wrote " << corpus.twitter.size() << " twitter posts, " << corpus.instagram.size()
            << " instagram posts, " << corpus.truth.size() << " linked users to " << root.string() << '\n';
  return 0;
}

int cmd_ingest(const std::string& input, const std::string& output) {
  const auto result = ingest(input);
  report_warnings(result.warnings);
  auto out = open_out(output);
  out << "# crossres " << pipeline::kToolVersion << " ingest=" << fs::path(input).filename().string() << '\n';
  write_posts(out, result.posts);
  const auto& s = result.stats;
  std::cout << "lines=" << s.lines << " accepted=" << s.accepted << " malformed=" << s.malformed
            << " duplicates=" << s.duplicates << " blank=" << s.blank << '\n';
  return 0;
}

int cmd_build_graph(const pipeline::RunConfig& config) {
  const auto corpora = pipeline::load_corpora(config);
  report_warnings(corpora.warnings);
  const auto g = pipeline::build_graphs(corpora, config);
  const fs::path root(config.output_dir);
  const std::string header = config.header();
  auto emit = [&](const char* name, auto&& write) {
    auto out = open_out(root / name);
    out << header << '\n';
    write(out);
  };
  emit("twitter_edges.tsv", [&](std::ostream& o) { graph::write_edges_tsv(o, g.twitter); });
  emit("twitter_vertices.tsv", [&](std::ostream& o) { graph::write_vertices_tsv(o, g.twitter); });
  emit("instagram_edges.tsv", [&](std::ostream& o) { graph::write_edges_tsv(o, g.instagram); });
  emit("instagram_vertices.tsv", [&](std::ostream& o) { graph::write_vertices_tsv(o, g.instagram); });
  emit("aligned_edges.tsv", [&](std::ostream& o) { graph::write_edges_tsv(o, g.aligned); });
  emit("aligned_vertices.tsv", [&](std::ostream& o) { graph::write_vertices_tsv(o, g.aligned); });
  std::cout << "seeds=" << g.seeds.pairs.size() << " aligned_vertices=" << g.aligned.size()
            << " edges=" << g.aligned.edge_count() << " communities=" << g.aligned.community_count() << '\n';
  return 0;
}

int cmd_features(const pipeline::RunConfig& config) {
  const auto corpora = pipeline::load_corpora(config);
  report_warnings(corpora.warnings);
  const auto tw_counts = content::tokenize_posts(corpora.twitter);
  const auto vocab = content::Vocabulary::build(tw_counts);
  std::vector<content::ContentVector> vectors;
  for (const auto& [id, u] : tw_counts) vectors.push_back(content::build_content_vector(u, vocab));
  learners::SvmParams params;
  params.c = config.svm_c;
  params.seed = config.seed;
  const auto models = content::train_author_models(vectors, vocab.size(), config.min_words, params);
  const fs::path root(config.output_dir);
  auto out = open_out(root / "author_models.jsonl");
  out << config.header() << '\n';
  content::write_model_store(out, models);
  std::cout << "vocabulary=" << vocab.size() << " author_models=" << models.size() << '\n';
  return 0;
}

int cmd_trials(const pipeline::RunConfig& config) {
  const auto corpora = pipeline::load_corpora(config);
  report_warnings(corpora.warnings);
  const auto trials = pipeline::make_trials(corpora, config);
  auto out = open_out(fs::path(config.output_dir) / "trials.tsv");
  out << config.header() << '\n';
  pipeline::write_trials_tsv(out, trials);
  std::cout << "trials=" << trials.size() << '\n';
  return 0;
}

int cmd_score(const pipeline::RunConfig& config) {
  const auto corpora = pipeline::load_corpora(config);
  std::vector<std::string> warnings = corpora.warnings;
  const auto graphs = pipeline::build_graphs(corpora, config);
  const auto trials = pipeline::make_trials(corpora, config);
  const auto systems = pipeline::score_features(corpora, graphs, trials, config, &warnings);
  const auto table = pipeline::fusion_table(trials, systems, config);
  report_warnings(warnings);
  const fs::path root(config.output_dir);
  {
    auto out = open_out(root / "system_scores.tsv");
    out << config.header() << '\n';
    pipeline::write_score_sheet(out, trials, systems);
  }
  auto out = open_out(root / "scores.tsv");
  out << config.header() << '\n';
  fusion::write_score_table(out, table);
  std::cout << "trials=" << trials.size() << " systems=" << systems.size() << '\n';
  return 0;
}

int cmd_fuse(const pipeline::RunConfig& config, std::string scores_path) {
  const fs::path root(config.output_dir);
  if (scores_path.empty()) scores_path = (root / "scores.tsv").string();
  std::ifstream in(scores_path);
  if (!in) throw DataError("cannot read score table '" + scores_path + "'");
  const auto table = fusion::read_score_table(in);
  std::vector<std::string> warnings;
  const auto fused = pipeline::fuse(table, config, &warnings);
  report_warnings(warnings);
  std::vector<eval::Trial> trials;
  for (const auto& r : table.rows) {
    eval::Trial t;
    t.id = r.trial_id;
    t.label = r.label;
    t.nontrivial = r.nontrivial;
    t.fold = r.fold;
    trials.push_back(std::move(t));
  }
  std::vector<pipeline::SystemScores> systems;
  for (const auto& f : fused) systems.push_back({"Fusion", f.name, f.scores});
  auto out = open_out(root / "fused.tsv");
  out << config.header() << '\n';
  pipeline::write_score_sheet(out, trials, systems);
  std::cout << "fused systems=" << fused.size() << " rows=" << table.rows.size() << '\n';
  return 0;
}

int cmd_eval(const pipeline::RunConfig& config) {
  const fs::path root(config.output_dir);
  std::vector<eval::Trial> trials;
  std::vector<pipeline::SystemScores> systems;
  {
    std::ifstream in(root / "system_scores.tsv");
    if (!in) throw DataError("cannot read '" + (root / "system_scores.tsv").string() + "'; run score first");
    pipeline::read_score_sheet(in, trials, systems);
  }
  if (std::ifstream in(root / "fused.tsv"); in) {
    std::vector<eval::Trial> fused_trials;
    std::vector<pipeline::SystemScores> fused;
    pipeline::read_score_sheet(in, fused_trials, fused);
    if (fused_trials.size() != trials.size()) throw DataError("fused.tsv and system_scores.tsv disagree on trials");
    for (size_t i = 0; i < trials.size(); ++i)
      if (fused_trials[i].id != trials[i].id) throw DataError("fused.tsv and system_scores.tsv disagree on trials");
    systems.insert(systems.end(), fused.begin(), fused.end());
  }
  pipeline::write_evaluation(config.output_dir, config, trials, systems);
  std::cout << "report=" << (root / "report.tsv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain entity resolution over social-media profiles, content and graphs"};
  app.require_subcommand(1);

  synth::SynthParams synth_params;
  std::string synth_out = "synth";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic linked corpus pair");
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--users", synth_params.n_users, "Number of personas");
  synth_cmd->add_option("--overlap", synth_params.overlap_fraction, "Fraction of personas on both platforms");
  synth_cmd->add_option("--seed", synth_params.seed, "Random seed");
  synth_cmd->add_option("--idiolect-share", synth_params.idiolect_share, "Share of words from the personal vocabulary");
  synth_cmd->add_option("--low-activity", synth_params.low_activity, "Share of rarely posting personas");

  std::string ingest_in, ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize one JSON Lines corpus");
  ingest_cmd->add_option("--input", ingest_in, "Corpus to read")->required();
  ingest_cmd->add_option("--output", ingest_out, "Normalized corpus to write")->required();

  struct Stage {
    const char* name;
    const char* help;
    ConfigFlags flags;
    CLI::App* cmd = nullptr;
  };
  std::vector<Stage> stages = {{"build-graph", "Build domain and aligned graphs with communities", {}},
                               {"features", "Train content author models", {}},
                               {"trials", "Build trials and cross-validation folds", {}},
                               {"score", "Score every configured feature system", {}},
                               {"fuse", "Fuse a score table per fold", {}},
                               {"eval", "Write the EER report and DET curves", {}},
                               {"run", "Run the whole pipeline", {}}};
  std::string fuse_scores;
  for (auto& s : stages) {
    s.cmd = app.add_subcommand(s.name, s.help);
    s.flags.attach(s.cmd);
    if (std::string_view(s.name) == "fuse") s.cmd->add_option("--scores", fuse_scores, "Score table TSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth_params, synth_out);
    if (ingest_cmd->parsed()) return cmd_ingest(ingest_in, ingest_out);
    for (auto& s : stages) {
      if (!s.cmd->parsed()) continue;
      const auto config = s.flags.resolve();
      const std::string_view name = s.name;
      if (name == "build-graph") return cmd_build_graph(config);
      if (name == "features") return cmd_features(config);
      if (name == "trials") return cmd_trials(config);
      if (name == "score") return cmd_score(config);
      if (name == "fuse") return cmd_fuse(config, fuse_scores);
      if (name == "eval") return cmd_eval(config);
      pipeline::run_pipeline(config);
      std::cout << "report=" << (fs::path(config.output_dir) / "report.tsv").string() << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
