#ifndef CROSSRES_SYNTH_H_
#define CROSSRES_SYNTH_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "crossres/corpus.h"

namespace crossres::synth {

enum class UsernameNoise { identical, suffix, rotation, edit, unrelated };

std::string_view to_string(UsernameNoise mode);

// Relative weights of the Instagram username perturbations for linked users.
struct UsernameNoiseMix {
  double identical = 0.35;
  double suffix = 0.2;
  double rotation = 0.1;
  double edit = 0.15;
  double unrelated = 0.2;
};

// Independent probabilities applied to the Instagram full name of linked
// users; missing also applies to Twitter names.
struct NameNoise {
  double reorder = 0.3;     // "Last, First"
  double diacritics = 0.3;
  double case_change = 0.3;
  double variant = 0.35;  // nickname, initial, typo, middle name or partial name
  double alias = 0.03;    // display name unrelated to the real name
  double decoration = 0.25;  // Instagram descriptor appended, e.g. "| photography"
  double missing = 0.15;
};

struct SynthParams {
  size_t n_users = 625;
  double overlap_fraction = 0.8;
  UsernameNoiseMix username;
  NameNoise name;
  size_t topics = 12;
  size_t words_per_topic = 40;
  size_t hashtags_per_topic = 8;
  size_t common_words = 150;
  size_t idiolect_words = 30;  // drawn from a shared slang pool
  size_t slang_words = 400;
  double idiolect_share = 0.08;
  double topic_share = 0.35;
  size_t min_posts = 20;
  size_t max_posts = 40;
  double low_activity = 0.15;  // users posting only a handful of times
  double instagram_activity = 0.5;  // Instagram post count relative to Twitter
  size_t first_names = 80;          // name pools; shared names make negatives hard
  size_t last_names = 150;
  size_t words_per_post = 12;
  size_t friends = 6;
  double friend_retention = 0.7;  // share of friends also mentioned on Instagram
  uint64_t seed = 1;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

struct SynthLink {
  std::string twitter_user;
  std::string instagram_user;
  std::string twitter_username;
  std::string instagram_username;
  UsernameNoise noise = UsernameNoise::identical;
};

struct SynthCorpus {
  std::vector<Post> twitter;
  std::vector<Post> instagram;
  std::vector<SynthLink> truth;
};

// Linked personas (the first round(n_users * overlap_fraction)) hold one
// account per platform; the rest live on a single platform. Personas share
// topic vocabularies and hashtags, carry a private idiolect and mention a
// stable friend list on both sides.
SynthCorpus synth_corpus(const SynthParams& params);

// Columns: twitter_user, instagram_user, twitter_username, instagram_username,
// username_noise.
void write_truth_tsv(std::ostream& out, const std::vector<SynthLink>& truth);

}  // namespace crossres::synth

#endif  // CROSSRES_SYNTH_H_
