#include "crossres/corpus.h"

#include <fstream>
#include <set>

#include "crossres/errors.h"
#include "crossres/normalize.h"
#include "crossres/unicode.h"

namespace crossres {

std::string_view to_string(Domain d) { return d == Domain::twitter ? "twitter" : "instagram"; }

Domain parse_domain(std::string_view s) {
  if (s == "twitter") return Domain::twitter;
  if (s == "instagram") return Domain::instagram;
  throw DataError("unknown domain '" + std::string(s) + "'");
}

nlohmann::json to_json(const Post& post) {
  nlohmann::json j;
  j["domain"] = to_string(post.domain);
  j["post_id"] = post.post_id;
  j["user_id"] = post.user_id;
  j["username"] = post.username;
  j["full_name"] = post.full_name ? nlohmann::json(*post.full_name) : nlohmann::json(nullptr);
  j["text"] = post.text;
  j["mentions"] = post.mentions;
  j["hashtags"] = post.hashtags;
  j["link_target"] = post.link_target ? nlohmann::json(*post.link_target) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::string required_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw DataError(std::string("missing string field '") + key + "'");
  return unicode::sanitize_utf8(it->get<std::string>());
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  std::string value = unicode::sanitize_utf8(it->get<std::string>());
  if (value.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key, char strip_prefix) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw DataError(std::string("field '") + key + "' must be an array");
  for (const auto& e : *it) {
    if (!e.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
    std::string value = unicode::sanitize_utf8(e.get<std::string>());
    if (!value.empty() && value.front() == strip_prefix) value.erase(0, 1);
    value = normalize::lowercase(value);
    if (!value.empty()) out.push_back(std::move(value));
  }
  return out;
}

}  // namespace

Post post_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("post must be a JSON object");
  Post post;
  post.domain = parse_domain(required_string(j, "domain"));
  post.post_id = required_string(j, "post_id");
  post.user_id = required_string(j, "user_id");
  post.username = required_string(j, "username");
  if (post.post_id.empty() || post.user_id.empty() || post.username.empty())
    throw DataError("post_id, user_id and username must be non-empty");
  if (post.username.front() == '@') post.username.erase(0, 1);
  post.full_name = optional_string(j, "full_name");
  auto text = j.find("text");
  if (text != j.end() && !text->is_null()) {
    if (!text->is_string()) throw DataError("field 'text' must be a string");
    post.text = unicode::sanitize_utf8(text->get<std::string>());
  }
  post.mentions = string_list(j, "mentions", '@');
  post.hashtags = string_list(j, "hashtags", '#');
  post.link_target = optional_string(j, "link_target");
  if (post.link_target && post.link_target->front() == '@') post.link_target->erase(0, 1);
  return post;
}

IngestResult ingest_stream(std::istream& in, const std::string& name) {
  IngestResult result;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    ++result.stats.lines;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      ++result.stats.blank;
      continue;
    }
    if (line.front() == '#') {
      ++result.stats.comments;
      continue;
    }
    Post post;
    try {
      post = post_from_json(nlohmann::json::parse(unicode::sanitize_utf8(line)));
    } catch (const nlohmann::json::exception&) {
      ++result.stats.malformed;
      continue;
    } catch (const DataError&) {
      ++result.stats.malformed;
      continue;
    }
    if (!seen.insert(post.post_id).second) {
      ++result.stats.duplicates;
      result.warnings.push_back(name + ":" + std::to_string(result.stats.lines) + ": duplicate post_id '" +
                                post.post_id + "' dropped");
      continue;
    }
    ++result.stats.accepted;
    result.posts.push_back(std::move(post));
  }
  const size_t considered = result.stats.lines - result.stats.blank - result.stats.comments;
  if (considered > 0 && 2 * result.stats.malformed > considered)
    throw DataError(name + ": " + std::to_string(result.stats.malformed) + " of " + std::to_string(considered) +
                    " lines are malformed");
  return result;
}

IngestResult ingest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus '" + path + "'");
  return ingest_stream(in, path);
}

std::map<std::string, UserProfile> collect_profiles(const std::vector<Post>& posts) {
  std::map<std::string, UserProfile> profiles;
  for (const auto& post : posts) {
    auto& p = profiles[post.user_id];
    p.user_id = post.user_id;
    p.username = post.username;
    if (post.full_name) p.full_name = post.full_name;
  }
  return profiles;
}

std::vector<TruthLink> extract_truth_links(const std::vector<Post>& twitter, const std::vector<Post>& instagram) {
  auto index_by_username = [](const std::vector<Post>& posts) {
    std::map<std::string, std::set<std::string>> index;
    for (const auto& p : posts) index[normalize::lowercase(p.username)].insert(p.user_id);
    return index;
  };
  const auto tw_names = index_by_username(twitter);
  const auto ig_names = index_by_username(instagram);

  std::set<TruthLink> pairs;
  auto resolve = [](const auto& index, const std::string& username) -> const std::set<std::string>* {
    auto it = index.find(normalize::lowercase(username));
    return it == index.end() ? nullptr : &it->second;
  };
  for (const auto& p : twitter) {
    if (!p.link_target) continue;
    if (const auto* targets = resolve(ig_names, *p.link_target))
      for (const auto& ig : *targets) pairs.insert({p.user_id, ig});
  }
  for (const auto& p : instagram) {
    if (!p.link_target) continue;
    if (const auto* targets = resolve(tw_names, *p.link_target))
      for (const auto& tw : *targets) pairs.insert({tw, p.user_id});
  }

  std::map<std::string, size_t> tw_count, ig_count;
  for (const auto& l : pairs) ++tw_count[l.twitter_user], ++ig_count[l.instagram_user];
  std::vector<TruthLink> links;
  for (const auto& l : pairs)
    if (tw_count[l.twitter_user] == 1 && ig_count[l.instagram_user] == 1) links.push_back(l);
  return links;
}

void write_posts(std::ostream& out, const std::vector<Post>& posts) {
  for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

}  // namespace crossres
