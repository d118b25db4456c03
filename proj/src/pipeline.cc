#include "crossres/pipeline.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "crossres/errors.h"
#include "crossres/strsim.h"

namespace crossres::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 4> kGraphColumns = {"Comm1", "NBR1", "Comm2", "NBR2"};

bool is_graph_column(std::string_view f) {
  return std::find(kGraphColumns.begin(), kGraphColumns.end(), f) != kGraphColumns.end();
}

size_t column_index(std::string_view feature) {
  for (size_t c = 0; c < fusion::kColumnCount; ++c)
    if (fusion::kColumnNames[c] == feature) return c;
  throw ConfigError("unknown feature '" + std::string(feature) + "'");
}

void validate_system(const std::string& feature, const std::string& system) {
  if (feature == "P_user" || feature == "P_full") {
    strsim::PipelineSpec::parse(system).validate();
  } else if (feature == "C" || is_graph_column(feature)) {
    if (system != "svm" && system != "dp")
      throw ConfigError("unknown " + feature + " system '" + system + "' (expected svm or dp)");
  } else {
    throw ConfigError("unknown feature '" + feature + "'");
  }
}

std::string_view scope_name(graph::TwoHopScope s) { return s == graph::TwoHopScope::ball ? "ball" : "ring"; }

graph::TwoHopScope parse_scope(const std::string& s) {
  if (s == "ball") return graph::TwoHopScope::ball;
  if (s == "ring") return graph::TwoHopScope::ring;
  throw ConfigError("unknown two-hop scope '" + s + "'");
}

template <typename F>
auto stage(std::string_view name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + std::string(name) + ": " + e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '_')) c = '_';
  return s;
}

}  // namespace

std::string FusionSystem::name() const { return bundles + "/" + std::string(fusion::to_string(kind)); }

RunConfig::RunConfig() {
  systems = {{"P_user", {"jw,norm,lower,nobw"}}, {"P_full", {"jw,norm,lower,nobw"}}, {"C", {"svm"}},
             {"Comm1", {"dp"}},                  {"NBR1", {"dp"}},                   {"Comm2", {"dp"}},
             {"NBR2", {"dp"}}};
  fusion = {{"P", fusion::ModelKind::random_forest},
            {"P+C", fusion::ModelKind::random_forest},
            {"P+C+N1+N2", fusion::ModelKind::random_forest},
            {"P+C+N1+N2", fusion::ModelKind::logit}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  static const std::set<std::string> kKeys = {
      "twitter",   "instagram",   "output_dir", "seed_mode",        "systems",  "fusion",
      "negatives_per_true", "folds", "seed",    "min_words",        "min_mask_rows", "svm_c",
      "logit_l2",  "trees",       "max_depth",  "community_two_hop", "neighborhood_two_hop"};
  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    if (j.contains("twitter")) c.twitter_path = j.at("twitter").get<std::string>();
    if (j.contains("instagram")) c.instagram_path = j.at("instagram").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed_mode")) c.seed_mode = graph::parse_seed_mode(j.at("seed_mode").get<std::string>());
    if (j.contains("systems")) {
      c.systems.clear();
      for (const auto& [feature, value] : j.at("systems").items()) {
        std::vector<std::string> ids;
        if (value.is_string()) ids.push_back(value.get<std::string>());
        else ids = value.get<std::vector<std::string>>();
        c.systems[feature] = std::move(ids);
      }
    }
    if (j.contains("fusion")) {
      c.fusion.clear();
      for (const auto& f : j.at("fusion"))
        c.fusion.push_back({f.at("bundles").get<std::string>(), fusion::parse_model_kind(f.at("kind").get<std::string>())});
    }
    if (j.contains("negatives_per_true")) c.negatives_per_true = j.at("negatives_per_true").get<size_t>();
    if (j.contains("folds")) c.folds = j.at("folds").get<size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("min_words")) c.min_words = j.at("min_words").get<int64_t>();
    if (j.contains("min_mask_rows")) c.min_mask_rows = j.at("min_mask_rows").get<size_t>();
    if (j.contains("svm_c")) c.svm_c = j.at("svm_c").get<double>();
    if (j.contains("logit_l2")) c.logit_l2 = j.at("logit_l2").get<double>();
    if (j.contains("trees")) c.trees = j.at("trees").get<size_t>();
    if (j.contains("max_depth")) c.max_depth = j.at("max_depth").get<size_t>();
    if (j.contains("community_two_hop")) c.community_two_hop = parse_scope(j.at("community_two_hop").get<std::string>());
    if (j.contains("neighborhood_two_hop"))
      c.neighborhood_two_hop = parse_scope(j.at("neighborhood_two_hop").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json fusion_list = nlohmann::json::array();
  for (const auto& f : fusion) fusion_list.push_back({{"bundles", f.bundles}, {"kind", fusion::to_string(f.kind)}});
  return {{"twitter", twitter_path},
          {"instagram", instagram_path},
          {"output_dir", output_dir},
          {"seed_mode", graph::to_string(seed_mode)},
          {"systems", systems},
          {"fusion", fusion_list},
          {"negatives_per_true", negatives_per_true},
          {"folds", folds},
          {"seed", seed},
          {"min_words", min_words},
          {"min_mask_rows", min_mask_rows},
          {"svm_c", svm_c},
          {"logit_l2", logit_l2},
          {"trees", trees},
          {"max_depth", max_depth},
          {"community_two_hop", scope_name(community_two_hop)},
          {"neighborhood_two_hop", scope_name(neighborhood_two_hop)}};
}

void RunConfig::validate() const {
  for (const auto& [feature, ids] : systems) {
    column_index(feature);
    std::set<std::string> seen;
    for (const auto& id : ids) {
      validate_system(feature, id);
      if (!seen.insert(id).second) throw ConfigError("system '" + id + "' listed twice for " + feature);
    }
  }
  for (const auto& f : fusion) fusion::parse_bundles(f.bundles);
  if (negatives_per_true == 0) throw ConfigError("negatives_per_true must be positive");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (min_words < 0) throw ConfigError("min_words must be non-negative");
  if (!(svm_c > 0)) throw ConfigError("svm_c must be positive");
  if (!(logit_l2 >= 0)) throw ConfigError("logit_l2 must be non-negative");
  if (trees == 0 || max_depth == 0) throw ConfigError("trees and max_depth must be positive");
}

void RunConfig::check_paths() const {
  for (const auto* p : {&twitter_path, &instagram_path}) {
    if (p->empty()) throw ConfigError("both corpus paths must be set");
    if (!fs::exists(*p)) throw ConfigError("corpus '" + *p + "' does not exist");
  }
}

std::string RunConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("output_dir");
  const std::string canonical = j.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::header() const { return "# crossres " + std::string(kToolVersion) + " config=" + hash(); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return RunConfig::from_json(j);
}

Corpora load_corpora(const RunConfig& config) {
  config.check_paths();
  Corpora c;
  auto load = [&](const std::string& path, Domain domain) {
    IngestResult r = ingest(path);
    for (const auto& p : r.posts)
      if (p.domain != domain)
        throw DataError(path + ": post " + p.post_id + " belongs to " + std::string(to_string(p.domain)));
    c.warnings.insert(c.warnings.end(), r.warnings.begin(), r.warnings.end());
    if (r.stats.malformed > 0)
      c.warnings.push_back(path + ": skipped " + std::to_string(r.stats.malformed) + " malformed lines");
    return std::move(r.posts);
  };
  c.twitter = load(config.twitter_path, Domain::twitter);
  c.instagram = load(config.instagram_path, Domain::instagram);
  c.twitter_profiles = collect_profiles(c.twitter);
  c.instagram_profiles = collect_profiles(c.instagram);
  return c;
}

GraphStage build_graphs(const Corpora& corpora, const RunConfig& config) {
  GraphStage g;
  g.twitter = graph::build_graph(corpora.twitter, Domain::twitter);
  g.instagram = graph::build_graph(corpora.instagram, Domain::instagram);
  g.seeds = graph::select_seeds(g.twitter, g.instagram, config.seed_mode);
  g.aligned = graph::align_graphs(g.twitter, g.instagram, g.seeds);
  g.aligned.set_communities(graph::detect_communities(g.aligned, config.seed));
  return g;
}

std::vector<eval::Trial> make_trials(const Corpora& corpora, const RunConfig& config) {
  const auto links = extract_truth_links(corpora.twitter, corpora.instagram);
  std::vector<eval::LinkedPair> pairs;
  for (const auto& l : links) {
    const auto& tw = corpora.twitter_profiles.at(l.twitter_user);
    const auto& ig = corpora.instagram_profiles.at(l.instagram_user);
    pairs.push_back({{tw.user_id, tw.username}, {ig.user_id, ig.username}});
  }
  std::vector<eval::UserRef> pool;
  for (const auto& [id, p] : corpora.instagram_profiles) pool.push_back({id, p.username});
  auto trials = eval::build_trials(pairs, pool, config.negatives_per_true, config.seed);
  eval::kfold_split(trials, config.folds, config.seed);
  return trials;
}

namespace {

using FeatureSlot = std::array<std::optional<graph::GraphFeature>, 4>;

class GraphFeatureCache {
 public:
  GraphFeatureCache(const graph::AlignedGraph& g, const RunConfig& config) : g_(g), config_(config) {}

  const FeatureSlot& get(Domain domain, const std::string& username) {
    auto key = std::make_pair(domain, username);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    FeatureSlot slot;
    if (auto v = g_.find(domain, graph::user_key(username))) {
      slot[0] = graph::community_feature(g_, *v, 1);
      slot[1] = graph::neighborhood_feature(g_, *v, 1);
      slot[2] = graph::community_feature(g_, *v, 2, config_.community_two_hop);
      slot[3] = graph::neighborhood_feature(g_, *v, 2, config_.neighborhood_two_hop);
    }
    return cache_.emplace(key, std::move(slot)).first->second;
  }

 private:
  const graph::AlignedGraph& g_;
  const RunConfig& config_;
  std::map<std::pair<Domain, std::string>, FeatureSlot> cache_;
};

std::optional<std::string> full_name(const std::map<std::string, UserProfile>& profiles, const std::string& id) {
  auto it = profiles.find(id);
  if (it == profiles.end()) return std::nullopt;
  return it->second.full_name;
}

}  // namespace

std::vector<SystemScores> score_features(const Corpora& corpora, const GraphStage& graphs,
                                         const std::vector<eval::Trial>& trials, const RunConfig& config,
                                         std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  std::vector<SystemScores> out;
  const size_t n = trials.size();

  auto systems_of = [&](std::string_view feature) -> const std::vector<std::string>& {
    static const std::vector<std::string> kNone;
    auto it = config.systems.find(std::string(feature));
    return it == config.systems.end() ? kNone : it->second;
  };

  // Profile features.
  for (const char* feature : {"P_user", "P_full"}) {
    const bool is_user = std::string_view(feature) == "P_user";
    const auto field = is_user ? strsim::Field::username : strsim::Field::full_name;
    for (const auto& id : systems_of(feature)) {
      const auto spec = strsim::PipelineSpec::parse(id);
      strsim::TokenStats stats;
      if (spec.metric == strsim::Metric::soft_tfidf) {
        for (const auto* profiles : {&corpora.twitter_profiles, &corpora.instagram_profiles})
          for (const auto& [_, p] : *profiles) {
            if (is_user) stats.add_document(strsim::preprocess(p.username, spec, field));
            else if (p.full_name) stats.add_document(strsim::preprocess(*p.full_name, spec, field));
          }
      }
      SystemScores s{feature, id, std::vector<std::optional<double>>(n)};
      for (size_t i = 0; i < n; ++i) {
        const auto& t = trials[i];
        if (is_user) {
          s.scores[i] = strsim::profile_similarity(t.twitter_username, t.instagram_username, spec, field, &stats).value;
        } else {
          const auto a = full_name(corpora.twitter_profiles, t.twitter_user);
          const auto b = full_name(corpora.instagram_profiles, t.instagram_user);
          if (a && b) s.scores[i] = strsim::profile_similarity(*a, *b, spec, field, &stats).value;
        }
      }
      out.push_back(std::move(s));
    }
  }

  // Content feature.
  if (!systems_of("C").empty()) {
    const auto tw_counts = content::tokenize_posts(corpora.twitter);
    const auto ig_counts = content::tokenize_posts(corpora.instagram);
    const auto vocab = content::Vocabulary::build(tw_counts);
    std::map<std::string, content::ContentVector> tw_vectors, ig_vectors;
    std::vector<content::ContentVector> tw_list;
    for (const auto& [id, u] : tw_counts) {
      tw_vectors.emplace(id, content::build_content_vector(u, vocab));
      tw_list.push_back(tw_vectors.at(id));
    }
    for (const auto& [id, u] : ig_counts) ig_vectors.emplace(id, content::build_content_vector(u, vocab));

    for (const auto& id : systems_of("C")) {
      SystemScores s{"C", id, std::vector<std::optional<double>>(n)};
      if (id == "svm") {
        learners::SvmParams params;
        params.c = config.svm_c;
        params.seed = config.seed;
        content::AuthorModels models;
        try {
          models = content::train_author_models(tw_list, vocab.size(), config.min_words, params);
        } catch (const DataError& e) {
          warn(std::string("content: ") + e.what() + "; content scores left missing");
        }
        for (size_t i = 0; i < n; ++i)
          s.scores[i] = content::score_content(trials[i].twitter_user, trials[i].instagram_user, models, ig_vectors);
      } else {
        for (size_t i = 0; i < n; ++i) {
          auto a = tw_vectors.find(trials[i].twitter_user);
          auto b = ig_vectors.find(trials[i].instagram_user);
          if (a == tw_vectors.end() || b == ig_vectors.end()) continue;
          if (a->second.no_content() || b->second.no_content() || a->second.total_words < config.min_words) continue;
          s.scores[i] = cosine(a->second.v, b->second.v);
        }
      }
      out.push_back(std::move(s));
    }
  }

  // Graph features.
  GraphFeatureCache cache(graphs.aligned, config);
  std::vector<const FeatureSlot*> tw_slots(n), ig_slots(n);
  for (size_t i = 0; i < n; ++i) {
    tw_slots[i] = &cache.get(Domain::twitter, trials[i].twitter_username);
    ig_slots[i] = &cache.get(Domain::instagram, trials[i].instagram_username);
  }
  std::set<int> folds;
  for (const auto& t : trials) folds.insert(t.fold);
  for (size_t k = 0; k < kGraphColumns.size(); ++k) {
    const std::string feature(kGraphColumns[k]);
    for (const auto& id : systems_of(feature)) {
      SystemScores s{feature, id, std::vector<std::optional<double>>(n)};
      if (id == "dp") {
        for (size_t i = 0; i < n; ++i) {
          const auto& a = (*tw_slots[i])[k];
          const auto& b = (*ig_slots[i])[k];
          if (a && b) s.scores[i] = graph::dp_similarity(*a, *b);
        }
      } else {
        learners::SvmParams params;
        params.c = config.svm_c;
        params.seed = config.seed;
        for (int fold : folds) {
          std::vector<graph::PairSvm::Example> examples;
          for (size_t i = 0; i < n; ++i) {
            const auto& a = (*tw_slots[i])[k];
            const auto& b = (*ig_slots[i])[k];
            if (trials[i].fold != fold && a && b) examples.push_back({&*a, &*b, trials[i].label});
          }
          graph::PairSvm model;
          try {
            model = graph::PairSvm::train(examples, params);
          } catch (const DataError& e) {
            warn(feature + "/svm fold " + std::to_string(fold) + ": " + e.what() + "; fold left missing");
            continue;
          }
          for (size_t i = 0; i < n; ++i) {
            const auto& a = (*tw_slots[i])[k];
            const auto& b = (*ig_slots[i])[k];
            if (trials[i].fold == fold && a && b) s.scores[i] = model.score(*a, *b);
          }
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

fusion::ScoreTable fusion_table(const std::vector<eval::Trial>& trials, const std::vector<SystemScores>& systems,
                                const RunConfig& config) {
  std::array<fusion::ScoreMap, fusion::kColumnCount> maps;
  std::array<const fusion::ScoreMap*, fusion::kColumnCount> ptrs{};
  for (const auto& s : systems) {
    const auto it = config.systems.find(s.feature);
    if (it == config.systems.end() || it->second.empty() || it->second.front() != s.system) continue;
    const size_t c = column_index(s.feature);
    for (size_t i = 0; i < trials.size(); ++i)
      if (s.scores[i]) maps[c].emplace(trials[i].id, *s.scores[i]);
    ptrs[c] = &maps[c];
  }
  return fusion::assemble_score_table(trials, ptrs);
}

std::vector<FusedSystem> fuse(const fusion::ScoreTable& table, const RunConfig& config,
                              std::vector<std::string>* warnings) {
  std::set<int> folds;
  for (const auto& r : table.rows) folds.insert(r.fold);
  std::vector<FusedSystem> out;
  for (const auto& system : config.fusion) {
    FusedSystem fused{system.name(), std::vector<std::optional<double>>(table.rows.size()),
                      std::vector<std::optional<fusion::Mask>>(table.rows.size())};
    fusion::FusionParams params;
    params.kind = system.kind;
    params.selection = fusion::parse_bundles(system.bundles);
    params.min_mask_rows = config.min_mask_rows;
    params.logistic.l2 = config.logit_l2;
    params.forest.trees = config.trees;
    params.forest.max_depth = config.max_depth;
    for (int fold : folds) {
      std::vector<fusion::ScoreRow> train, test;
      std::vector<size_t> test_index;
      for (size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].fold == fold) {
          test.push_back(table.rows[i]);
          test_index.push_back(i);
        } else {
          train.push_back(table.rows[i]);
        }
      }
      params.forest.seed = config.seed + static_cast<uint64_t>(fold) + 1;
      fusion::FusionModelSet models;
      try {
        models = fusion::train_fusion(train, params);
      } catch (const DataError& e) {
        if (warnings) warnings->push_back(fused.name + " fold " + std::to_string(fold) + ": " + e.what());
        continue;
      }
      const auto scored = fusion::score_fusion(test, models, warnings);
      for (size_t k = 0; k < scored.size(); ++k) {
        fused.scores[test_index[k]] = scored[k].score;
        fused.masks[test_index[k]] = scored[k].model_mask;
      }
    }
    out.push_back(std::move(fused));
  }
  return out;
}

std::vector<eval::EvalReportRow> evaluate_all(const std::vector<eval::Trial>& trials,
                                              const std::vector<SystemScores>& systems) {
  std::vector<eval::EvalReportRow> rows;
  for (const auto& s : systems) rows.push_back(eval::evaluate(s.feature, s.system, s.scores, trials));
  return rows;
}

void write_score_sheet(std::ostream& out, const std::vector<eval::Trial>& trials,
                       const std::vector<SystemScores>& systems) {
  out << "trial_id\tlabel\tnontrivial\tfold";
  for (const auto& s : systems) out << '\t' << s.feature << ':' << s.system;
  out << '\n';
  for (size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    out << t.id << '\t' << (t.label ? 1 : 0) << '\t' << (t.nontrivial ? 1 : 0) << '\t' << t.fold;
    for (const auto& s : systems) out << '\t' << (s.scores[i] ? fusion::format_score(*s.scores[i]) : "NA");
    out << '\n';
  }
}

void read_score_sheet(std::istream& in, std::vector<eval::Trial>& trials, std::vector<SystemScores>& systems) {
  trials.clear();
  systems.clear();
  std::string line;
  std::vector<int> column_system;  // -1 for skipped columns
  bool header = false;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    if (!header) {
      if (f.size() < 4 || f[0] != "trial_id") throw DataError("score sheet header not recognized");
      for (size_t c = 4; c < f.size(); ++c) {
        const auto colon = f[c].find(':');
        if (colon == std::string::npos) throw DataError("score column '" + f[c] + "' lacks feature:system");
        if (f[c].size() >= 5 && f[c].compare(f[c].size() - 5, 5, ":mask") == 0) {
          column_system.push_back(-1);
          continue;
        }
        column_system.push_back(static_cast<int>(systems.size()));
        systems.push_back({f[c].substr(0, colon), f[c].substr(colon + 1), {}});
      }
      header = true;
      continue;
    }
    if (f.size() != 4 + column_system.size())
      throw DataError("score sheet line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields");
    eval::Trial t;
    t.id = f[0];
    try {
      t.label = std::stoi(f[1]) != 0;
      t.nontrivial = std::stoi(f[2]) != 0;
      t.fold = std::stoi(f[3]);
      for (size_t c = 0; c < column_system.size(); ++c) {
        if (column_system[c] < 0) continue;
        auto& col = systems[static_cast<size_t>(column_system[c])].scores;
        col.push_back(f[4 + c] == "NA" ? std::nullopt : std::optional<double>(std::stod(f[4 + c])));
      }
    } catch (const std::logic_error&) {
      throw DataError("score sheet line " + std::to_string(line_no) + " has a bad number");
    }
    trials.push_back(std::move(t));
  }
  if (!header) throw DataError("score sheet is empty");
}

void write_trials_tsv(std::ostream& out, const std::vector<eval::Trial>& trials) {
  out << "trial_id\ttwitter_user\tinstagram_user\ttwitter_username\tinstagram_username\tlabel\tnontrivial\tgroup\tfold\n";
  for (const auto& t : trials)
    out << t.id << '\t' << t.twitter_user << '\t' << t.instagram_user << '\t' << t.twitter_username << '\t'
        << t.instagram_username << '\t' << (t.label ? 1 : 0) << '\t' << (t.nontrivial ? 1 : 0) << '\t' << t.group
        << '\t' << t.fold << '\n';
}

void write_evaluation(const std::string& dir, const RunConfig& config, const std::vector<eval::Trial>& trials,
                      const std::vector<SystemScores>& systems) {
  const fs::path root(dir);
  fs::create_directories(root / "det");
  {
    auto out = open_output(root / "report.tsv");
    out << config.header() << '\n';
    eval::write_report_tsv(out, evaluate_all(trials, systems));
  }
  for (const auto& s : systems) {
    std::vector<bool> labels;
    for (const auto& t : trials) labels.push_back(t.label);
    const auto set = eval::split_scores(s.scores, labels);
    if (set.targets.empty() || set.nontargets.empty()) continue;
    auto out = open_output(root / "det" / (sanitize(s.feature) + "__" + sanitize(s.system) + ".csv"));
    out << config.header() << '\n';
    eval::write_det_csv(out, eval::sweep_det(set.targets, set.nontargets));
  }
}

void run_pipeline(const RunConfig& config) {
  config.validate();
  const fs::path root(config.output_dir);
  fs::create_directories(root);
  const std::string header = config.header();
  std::vector<std::string> warnings;

  const Corpora corpora = stage("ingest", [&] { return load_corpora(config); });
  warnings.insert(warnings.end(), corpora.warnings.begin(), corpora.warnings.end());

  const GraphStage graphs = stage("build-graph", [&] { return build_graphs(corpora, config); });
  if (graphs.seeds.degenerate) warnings.push_back("no seed pairs found; graphs aligned without merging");
  {
    auto out = open_output(root / "aligned_edges.tsv");
    out << header << '\n';
    graph::write_edges_tsv(out, graphs.aligned);
    auto vout = open_output(root / "aligned_vertices.tsv");
    vout << header << '\n';
    graph::write_vertices_tsv(vout, graphs.aligned);
  }

  const auto trials = stage("trials", [&] { return make_trials(corpora, config); });
  {
    auto out = open_output(root / "trials.tsv");
    out << header << '\n';
    write_trials_tsv(out, trials);
  }

  auto systems = stage("score", [&] { return score_features(corpora, graphs, trials, config, &warnings); });
  const auto table = stage("score", [&] { return fusion_table(trials, systems, config); });
  {
    auto out = open_output(root / "system_scores.tsv");
    out << header << '\n';
    write_score_sheet(out, trials, systems);
    auto tout = open_output(root / "scores.tsv");
    tout << header << '\n';
    fusion::write_score_table(tout, table);
  }

  const auto fused = stage("fuse", [&] { return fuse(table, config, &warnings); });
  {
    auto out = open_output(root / "fused.tsv");
    out << header << '\n';
    out << "trial_id\tlabel\tnontrivial\tfold";
    for (const auto& f : fused) out << "\tFusion:" << f.name << "\tFusion:" << f.name << ":mask";
    out << '\n';
    for (size_t i = 0; i < trials.size(); ++i) {
      const auto& t = trials[i];
      out << t.id << '\t' << (t.label ? 1 : 0) << '\t' << (t.nontrivial ? 1 : 0) << '\t' << t.fold;
      for (const auto& f : fused)
        out << '\t' << (f.scores[i] ? fusion::format_score(*f.scores[i]) : "NA") << '\t'
            << (f.masks[i] ? std::to_string(*f.masks[i]) : "NA");
      out << '\n';
    }
  }
  for (const auto& f : fused) systems.push_back({"Fusion", f.name, f.scores});

  stage("eval", [&] { write_evaluation(config.output_dir, config, trials, systems); });
  {
    auto out = open_output(root / "warnings.txt");
    out << header << '\n';
    for (const auto& w : warnings) out << w << '\n';
  }
}

}  // namespace crossres::pipeline
