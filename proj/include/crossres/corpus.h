#ifndef CROSSRES_CORPUS_H_
#define CROSSRES_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace crossres {

enum class Domain { twitter, instagram };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view s);  // throws DataError

// One post (tweet or Instagram post/comment). Hashtags are stored without
// '#' and lowercased; mentions without '@'.
struct Post {
  Domain domain = Domain::twitter;
  std::string post_id;
  std::string user_id;
  std::string username;
  std::optional<std::string> full_name;
  std::string text;
  std::vector<std::string> mentions;
  std::vector<std::string> hashtags;
  // Username of the same person's account on the other platform.
  std::optional<std::string> link_target;
};

nlohmann::json to_json(const Post& post);
// Throws DataError when a required field is missing or mistyped.
Post post_from_json(const nlohmann::json& j);

struct IngestStats {
  size_t lines = 0;
  size_t accepted = 0;
  size_t malformed = 0;
  size_t duplicates = 0;
  size_t blank = 0;
  size_t comments = 0;  // '#' header lines
};

struct IngestResult {
  std::vector<Post> posts;
  IngestStats stats;
  std::vector<std::string> warnings;
};

// Parses a JSON Lines corpus. Malformed lines are skipped and counted;
// repeated post_ids keep the first occurrence. Throws DataError when the
// file cannot be read or more than half of the non-blank lines are malformed.
IngestResult ingest(const std::string& path);
IngestResult ingest_stream(std::istream& in, const std::string& name);

// Latest username and full name per user of one domain.
struct UserProfile {
  std::string user_id;
  std::string username;
  std::optional<std::string> full_name;
};

std::map<std::string, UserProfile> collect_profiles(const std::vector<Post>& posts);

struct TruthLink {
  std::string twitter_user;    // user_id
  std::string instagram_user;  // user_id
  friend auto operator<=>(const TruthLink&, const TruthLink&) = default;
};

// Union of link_target declarations from both sides, resolved against the
// other corpus by lowercased username. Users that end up in more than one
// pair on either side are dropped entirely. Sorted.
std::vector<TruthLink> extract_truth_links(const std::vector<Post>& twitter,
                                           const std::vector<Post>& instagram);

void write_posts(std::ostream& out, const std::vector<Post>& posts);

}  // namespace crossres

#endif  // CROSSRES_CORPUS_H_
