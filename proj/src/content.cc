#include "crossres/content.h"

#include <cmath>
#include <istream>
#include <ostream>

#include "crossres/errors.h"
#include "crossres/normalize.h"
#include "crossres/parallel.h"
#include "crossres/unicode.h"

namespace crossres::content {
namespace {

bool is_link(std::string_view token) {
  const std::string lower = normalize::lowercase(token);
  return lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.");
}

void split_spaces(const std::string& text, std::vector<std::string>& out) {
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    size_t j = text.find(' ', i);
    if (j == std::string::npos) j = text.size();
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  static const normalize::NormalizationConfig kConfig{true, true, false};
  std::vector<std::string> tokens;
  const std::u32string decoded = unicode::decode_utf8(text);
  size_t i = 0;
  while (i < decoded.size()) {
    while (i < decoded.size() && unicode::is_whitespace(decoded[i])) ++i;
    size_t j = i;
    while (j < decoded.size() && !unicode::is_whitespace(decoded[j])) ++j;
    if (j == i) break;
    const std::string raw = unicode::encode_utf8(std::u32string_view(decoded).substr(i, j - i));
    i = j;
    if (is_link(raw)) continue;
    if (raw.front() == '#') {
      std::string tag = normalize::normalize_text(std::string_view(raw).substr(1), kConfig);
      std::erase(tag, ' ');
      if (!tag.empty()) tokens.push_back("#" + tag);
      continue;
    }
    split_spaces(normalize::normalize_text(raw, kConfig), tokens);
  }
  return tokens;
}

std::map<std::string, UserCountVector> tokenize_posts(const std::vector<Post>& posts) {
  std::map<std::string, UserCountVector> users;
  if (posts.empty()) return users;
  const Domain domain = posts.front().domain;
  for (const auto& post : posts) {
    if (post.domain != domain) throw DataError("tokenize_posts expects posts from a single domain");
    auto& u = users[post.user_id];
    u.user_id = post.user_id;
    for (auto& token : tokenize_text(post.text)) {
      ++u.counts[token];
      ++u.total_words;
    }
  }
  return users;
}

Vocabulary Vocabulary::build(const std::map<std::string, UserCountVector>& users) {
  std::map<std::string, int64_t> totals;
  for (const auto& [id, u] : users)
    for (const auto& [word, count] : u.counts) totals[word] += count;
  Vocabulary vocab;
  for (const auto& [word, count] : totals) {
    vocab.lookup_.emplace(word, static_cast<uint32_t>(vocab.words_.size()));
    vocab.words_.push_back(word);
    vocab.global_counts_.push_back(count);
    vocab.total_tokens_ += count;
  }
  if (vocab.total_tokens_ == 0) throw DataError("vocabulary is empty: no tokens in the training domain");
  return vocab;
}

std::optional<uint32_t> Vocabulary::index(std::string_view word) const {
  auto it = lookup_.find(word);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::map<uint32_t, double> raw_weights(const UserCountVector& user, const Vocabulary& vocab, Weighting weighting) {
  std::map<uint32_t, double> out;
  if (user.total_words == 0) return out;
  const double total = static_cast<double>(vocab.total_tokens());
  for (const auto& [word, count] : user.counts) {
    const auto idx = vocab.index(word);
    if (!idx || count == 0) continue;
    const double global = static_cast<double>(vocab.global_count(*idx));
    const double p_all = global / total;
    const double c = std::log(1.0 / p_all) + 1.0;
    const double p_user = weighting == Weighting::user_share
                              ? static_cast<double>(count) / global
                              : static_cast<double>(count) / static_cast<double>(user.total_words);
    out[*idx] = c * p_user;
  }
  return out;
}

ContentVector build_content_vector(const UserCountVector& user, const Vocabulary& vocab, Weighting weighting) {
  ContentVector out;
  out.user_id = user.user_id;
  out.total_words = user.total_words;
  out.v = l2_normalized(to_sparse(raw_weights(user, vocab, weighting)));
  return out;
}

AuthorModels train_author_models(const std::vector<ContentVector>& vectors, size_t dim, int64_t min_words,
                                 const learners::SvmParams& params) {
  std::vector<const ContentVector*> eligible;
  for (const auto& v : vectors)
    if (v.total_words >= min_words && !v.no_content()) eligible.push_back(&v);
  if (eligible.size() < 2) throw DataError("insufficient authors");

  std::vector<SparseVector> x;
  x.reserve(eligible.size());
  for (const auto* v : eligible) x.push_back(v->v);

  std::vector<AuthorModel> trained(eligible.size());
  parallel_for(eligible.size(), [&](size_t k) {
    std::vector<int> y(eligible.size(), -1);
    y[k] = 1;
    trained[k] = {eligible[k]->user_id, learners::train_linear_svm(x, y, dim, params)};
  });

  AuthorModels models;
  for (auto& m : trained) models.emplace(m.user_id, std::move(m));
  return models;
}

std::optional<double> score_content(const std::string& twitter_user, const std::string& instagram_user,
                                    const AuthorModels& models,
                                    const std::map<std::string, ContentVector>& instagram_vectors) {
  auto model = models.find(twitter_user);
  if (model == models.end()) return std::nullopt;
  auto vec = instagram_vectors.find(instagram_user);
  if (vec == instagram_vectors.end() || vec->second.no_content()) return std::nullopt;
  return model->second.model.decision(vec->second.v);
}

void write_model_store(std::ostream& out, const AuthorModels& models) {
  for (const auto& [id, m] : models) {
    nlohmann::json record = {{"version", learners::kModelFormatVersion},
                             {"user_id", id},
                             {"model", learners::to_json(m.model)}};
    out << record.dump() << '\n';
  }
}

AuthorModels read_model_store(std::istream& in) {
  AuthorModels models;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("author model store is not valid JSON: ") + e.what());
    }
    if (record.value("version", 0) != learners::kModelFormatVersion)
      throw DataError("unsupported author model record version");
    AuthorModel m{record.at("user_id").get<std::string>(), learners::linear_from_json(record.at("model"))};
    models.emplace(m.user_id, std::move(m));
  }
  return models;
}

}  // namespace crossres::content
