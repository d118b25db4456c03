#include "crossres/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "crossres/errors.h"
#include "crossres/random.h"

namespace crossres::synth {

std::string_view to_string(UsernameNoise mode) {
  switch (mode) {
    case UsernameNoise::identical: return "identical";
    case UsernameNoise::suffix: return "suffix";
    case UsernameNoise::rotation: return "rotation";
    case UsernameNoise::edit: return "edit";
    case UsernameNoise::unrelated: return "unrelated";
  }
  return "identical";
}

void SynthParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("synth: " + what); };
  auto unit = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  if (n_users < 10) fail("n_users must be at least 10");
  unit(overlap_fraction, "overlap_fraction");
  const double mix[] = {username.identical, username.suffix, username.rotation, username.edit, username.unrelated};
  double total = 0.0;
  for (double w : mix) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("username noise weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) fail("username noise weights sum to zero");
  unit(name.reorder, "name.reorder");
  unit(name.diacritics, "name.diacritics");
  unit(name.case_change, "name.case_change");
  unit(name.variant, "name.variant");
  unit(name.alias, "name.alias");
  unit(name.decoration, "name.decoration");
  unit(name.missing, "name.missing");
  if (!(instagram_activity > 0.0 && instagram_activity <= 4.0)) fail("instagram_activity must lie in (0, 4]");
  if (first_names == 0 || last_names == 0) fail("name pools must be non-empty");
  unit(idiolect_share, "idiolect_share");
  unit(topic_share, "topic_share");
  if (idiolect_share + topic_share > 1.0) fail("idiolect_share + topic_share exceeds 1");
  unit(low_activity, "low_activity");
  unit(friend_retention, "friend_retention");
  if (idiolect_words > slang_words) fail("idiolect_words exceeds slang_words");
  if (topics == 0 || words_per_topic == 0 || hashtags_per_topic == 0 || common_words == 0 || idiolect_words == 0)
    fail("vocabulary sizes must be positive");
  if (min_posts == 0 || min_posts > max_posts) fail("need 0 < min_posts <= max_posts");
  if (words_per_post < 5) fail("words_per_post must be at least 5");
  if (friends + 1 > n_users) fail("friends must be smaller than n_users");
}

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";

struct Persona {
  std::string first;
  std::string last;
  size_t topic = 0;
  std::vector<std::string> idiolect;
  std::vector<std::string> hashtags;  // preferred subset of the topic's tags
  std::vector<size_t> friends;
  bool low_activity = false;
  bool on_twitter = false;
  bool on_instagram = false;
  std::string twitter_username;
  std::string instagram_username;
  std::optional<std::string> twitter_name;
  std::optional<std::string> instagram_name;
  UsernameNoise noise = UsernameNoise::identical;
};

class Generator {
 public:
  Generator(const SynthParams& params) : p_(params), rng_(params.seed) {}

  SynthCorpus run();

 private:
  std::string syllables(size_t count) {
    std::string s;
    for (size_t i = 0; i < count; ++i) {
      s += kConsonants[rng_.below(kConsonants.size())];
      s += kVowels[rng_.below(kVowels.size())];
      if (rng_.bernoulli(0.25)) s += kConsonants[rng_.below(kConsonants.size())];
    }
    return s;
  }

  std::string fresh_word(size_t min_syl, size_t max_syl) {
    while (true) {
      std::string w = syllables(min_syl + rng_.below(max_syl - min_syl + 1));
      if (words_.insert(w).second) return w;
    }
  }

  std::vector<std::string> fresh_words(size_t n, size_t min_syl, size_t max_syl) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) out.push_back(fresh_word(min_syl, max_syl));
    return out;
  }

  std::string capitalized(size_t min_syl, size_t max_syl) {
    std::string s = syllables(min_syl + rng_.below(max_syl - min_syl + 1));
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  }

  std::string digits(size_t n) {
    std::string s;
    for (size_t i = 0; i < n; ++i) s += static_cast<char>('0' + rng_.below(10));
    return s;
  }

  static std::string lower(std::string s) {
    for (auto& c : s)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
  }

  std::string base_username(const Persona& who) {
    const std::string f = lower(who.first), l = lower(who.last);
    switch (rng_.below(6)) {
      case 0: return f + l;
      case 1: return f.substr(0, 1) + l;
      case 2: return l + f;
      case 3: return f + "_" + l;
      case 4: return f + l + digits(2);
      default: return l + f.substr(0, 1);
    }
  }

  std::string claim(std::string name) {
    while (!usernames_.insert(name).second) name += static_cast<char>('0' + rng_.below(10));
    return name;
  }

  std::string perturb_username(const Persona& who, const std::string& base, UsernameNoise mode) {
    switch (mode) {
      case UsernameNoise::identical:
        return base;
      case UsernameNoise::suffix: {
        static constexpr std::string_view kSuffixes[] = {"ig", "gram", "official", "x", "photos"};
        static constexpr std::string_view kJoins[] = {"", "_", "."};
        std::string s = base + std::string(kJoins[rng_.below(3)]);
        s += rng_.bernoulli(0.4) ? digits(1 + rng_.below(3)) : std::string(kSuffixes[rng_.below(5)]);
        return s;
      }
      case UsernameNoise::rotation: {
        const std::string f = lower(who.first), l = lower(who.last);
        if (base == f + l) return l + f;
        if (base == l + f) return f + l;
        const size_t cut = 1 + rng_.below(base.size() - 1);
        return base.substr(cut) + base.substr(0, cut);
      }
      case UsernameNoise::edit: {
        std::string s = base;
        const size_t ops = 1 + rng_.below(2);
        for (size_t k = 0; k < ops; ++k) {
          const size_t pos = rng_.below(s.size());
          const char letter = static_cast<char>('a' + rng_.below(26));
          switch (rng_.below(4)) {
            case 0: s[pos] = letter; break;
            case 1: s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), letter); break;
            case 2:
              if (s.size() > 3) s.erase(pos, 1);
              break;
            default:
              if (pos + 1 < s.size()) std::swap(s[pos], s[pos + 1]);
          }
        }
        return s;
      }
      case UsernameNoise::unrelated:
        return lower(capitalized(2, 3)) + (rng_.bernoulli(0.5) ? digits(2) : std::string());
    }
    return base;
  }

  std::string with_diacritics(const std::string& name) {
    static const std::map<char, std::string> kAccents = {{'a', "\xC3\xA1"}, {'e', "\xC3\xA9"}, {'i', "\xC3\xAD"},
                                                         {'o', "\xC3\xB6"}, {'u', "\xC3\xBC"}, {'n', "\xC3\xB1"},
                                                         {'c', "\xC3\xA7"}};
    std::vector<size_t> candidates;
    for (size_t i = 0; i < name.size(); ++i)
      if (kAccents.count(name[i])) candidates.push_back(i);
    if (candidates.empty()) return name;
    rng_.shuffle(std::span<size_t>(candidates));
    candidates.resize(std::min<size_t>(candidates.size(), 1 + rng_.below(2)));
    std::sort(candidates.begin(), candidates.end());
    std::string out;
    size_t next = 0;
    for (size_t i = 0; i < name.size(); ++i) {
      if (next < candidates.size() && candidates[next] == i) {
        out += kAccents.at(name[i]);
        ++next;
      } else {
        out += name[i];
      }
    }
    return out;
  }

  std::string decorated(const std::string& name) {
    static const std::vector<std::string> kDescriptors = {
        "photography", "official", "art",   "fitness", "travels", "studio", "music",
        "design",      "blog",     "coach", "nyc",     "london",  "vlogs",  "makeup"};
    static const std::vector<std::string> kJoiners = {" | ", " - ", " ", " \xE2\x9C\xA8 "};
    return name + kJoiners[rng_.below(kJoiners.size())] + kDescriptors[rng_.below(kDescriptors.size())];
  }

  std::string noisy_full_name(const Persona& who) {
    if (rng_.bernoulli(p_.name.alias)) {
      std::string a = zipf(common_), b = zipf(common_);
      a[0] = static_cast<char>(a[0] - 'a' + 'A');
      b[0] = static_cast<char>(b[0] - 'a' + 'A');
      return a + " " + b;
    }
    std::string first = who.first, last = who.last;
    std::string middle;
    if (rng_.bernoulli(p_.name.variant)) {
      switch (rng_.below(6)) {
        case 0:
          if (first.size() > 3) first = first.substr(0, 3 + rng_.below(std::min<size_t>(2, first.size() - 3)));
          break;
        case 1: first = first.substr(0, 1) + "."; break;
        case 2: {
          const size_t pos = 1 + rng_.below(last.size() - 1);
          last[pos] = kVowels[rng_.below(kVowels.size())];
          break;
        }
        case 3: middle = first_pool_[rng_.below(first_pool_.size())]; break;
        case 4: return first;  // first name only
        default: last = last.substr(0, 1) + ".";
      }
    }
    if (rng_.bernoulli(p_.name.diacritics)) {
      first = with_diacritics(first);
      last = with_diacritics(last);
    }
    if (!middle.empty()) first += " " + middle;
    std::string name = rng_.bernoulli(p_.name.reorder) ? last + ", " + first : first + " " + last;
    if (rng_.bernoulli(p_.name.case_change)) {
      const bool upper = rng_.bernoulli(0.5);
      for (auto& c : name) {
        if (upper && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        if (!upper && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
    }
    return name;
  }

  UsernameNoise draw_noise() {
    const auto& m = p_.username;
    const double w[] = {m.identical, m.suffix, m.rotation, m.edit, m.unrelated};
    double total = 0.0;
    for (double x : w) total += x;
    double r = rng_.uniform() * total;
    for (size_t i = 0; i < 5; ++i) {
      if (r < w[i]) return static_cast<UsernameNoise>(i);
      r -= w[i];
    }
    return UsernameNoise::unrelated;
  }

  // Zipf-like pick favouring the front of the list.
  const std::string& zipf(const std::vector<std::string>& words) {
    const double u = rng_.uniform();
    const size_t idx = static_cast<size_t>(std::pow(static_cast<double>(words.size()) + 1.0, u)) - 1;
    return words[std::min(idx, words.size() - 1)];
  }

  std::vector<std::string> mention_targets(size_t self, Domain domain);
  void emit_posts(size_t self, Domain domain, std::vector<Post>& out);

  const SynthParams& p_;
  Rng rng_;
  std::set<std::string> words_;
  std::set<std::string> usernames_;
  std::vector<std::string> common_;
  std::vector<std::string> slang_;
  std::vector<std::string> first_pool_;
  std::vector<std::string> last_pool_;
  std::vector<std::vector<std::string>> topic_words_;
  std::vector<std::vector<std::string>> topic_tags_;
  std::vector<Persona> personas_;
  std::vector<std::string> twitter_ids_;
  std::vector<std::string> instagram_ids_;
  size_t post_counter_ = 0;
};

std::vector<std::string> Generator::mention_targets(size_t self, Domain domain) {
  const Persona& who = personas_[self];
  std::vector<std::string> out;
  for (size_t f : who.friends) {
    const Persona& other = personas_[f];
    if (domain == Domain::twitter && other.on_twitter) out.push_back(other.twitter_username);
    if (domain == Domain::instagram && other.on_instagram && rng_.bernoulli(p_.friend_retention))
      out.push_back(other.instagram_username);
  }
  return out;
}

void Generator::emit_posts(size_t self, Domain domain, std::vector<Post>& out) {
  const Persona& who = personas_[self];
  const bool tw = domain == Domain::twitter;
  const std::vector<std::string> targets = mention_targets(self, domain);
  size_t posts = who.low_activity ? 2 + rng_.below(5) : p_.min_posts + rng_.below(p_.max_posts - p_.min_posts + 1);
  if (!tw) posts = std::max<size_t>(1, static_cast<size_t>(std::llround(static_cast<double>(posts) * p_.instagram_activity)));
  const auto& topic = topic_words_[who.topic];
  const auto& tags = topic_tags_[who.topic];
  for (size_t k = 0; k < posts; ++k) {
    Post post;
    post.domain = domain;
    char id[32];
    std::snprintf(id, sizeof id, "%s-p%07zu", tw ? "tw" : "ig", ++post_counter_);
    post.post_id = id;
    post.user_id = tw ? twitter_ids_[self] : instagram_ids_[self];
    post.username = tw ? who.twitter_username : who.instagram_username;
    post.full_name = tw ? who.twitter_name : who.instagram_name;

    std::string text;
    const size_t n_words = p_.words_per_post - 4 + rng_.below(9);
    for (size_t w = 0; w < n_words; ++w) {
      const double r = rng_.uniform();
      const std::string& word = r < p_.idiolect_share                  ? zipf(who.idiolect)
                                : r < p_.idiolect_share + p_.topic_share ? zipf(topic)
                                                                        : zipf(common_);
      if (!text.empty()) text += ' ';
      text += word;
    }
    if (rng_.bernoulli(0.1)) text[0] = static_cast<char>(text[0] - 'a' + 'A');
    if (!targets.empty()) {
      const double r = rng_.uniform();
      const size_t n = r < 0.5 ? 0 : r < 0.85 ? 1 : 2;
      for (size_t m = 0; m < n; ++m) {
        const std::string& t = targets[rng_.below(targets.size())];
        if (std::find(post.mentions.begin(), post.mentions.end(), t) != post.mentions.end()) continue;
        post.mentions.push_back(t);
        text += " @" + t;
      }
    }
    {
      const double r = rng_.uniform();
      const size_t n = r < 0.4 ? 0 : r < 0.8 ? 1 : 2;
      for (size_t h = 0; h < n; ++h) {
        const std::string& tag = rng_.bernoulli(0.7) ? who.hashtags[rng_.below(who.hashtags.size())]
                                                     : tags[rng_.below(tags.size())];
        if (std::find(post.hashtags.begin(), post.hashtags.end(), tag) != post.hashtags.end()) continue;
        post.hashtags.push_back(tag);
        text += " #" + tag;
      }
    }
    if (rng_.bernoulli(0.08)) text += " \xF0\x9F\x98\x80";
    if (rng_.bernoulli(0.05)) text += "!!!";
    if (rng_.bernoulli(0.05)) text += " https://t.co/" + syllables(3);
    post.text = std::move(text);
    out.push_back(std::move(post));
  }
}

SynthCorpus Generator::run() {
  const size_t n = p_.n_users;
  const size_t linked = static_cast<size_t>(std::llround(static_cast<double>(n) * p_.overlap_fraction));

  common_ = fresh_words(p_.common_words, 1, 2);
  slang_ = fresh_words(p_.slang_words, 2, 3);
  for (size_t t = 0; t < p_.topics; ++t) {
    topic_words_.push_back(fresh_words(p_.words_per_topic, 2, 3));
    topic_tags_.push_back(fresh_words(p_.hashtags_per_topic, 2, 3));
  }

  for (size_t k = 0; k < p_.first_names; ++k) first_pool_.push_back(capitalized(2, 3));
  for (size_t k = 0; k < p_.last_names; ++k) last_pool_.push_back(capitalized(2, 4));

  personas_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Persona& who = personas_[i];
    who.first = first_pool_[rng_.below(first_pool_.size())];
    who.last = last_pool_[rng_.below(last_pool_.size())];
    who.topic = rng_.below(p_.topics);
    who.idiolect = slang_;
    rng_.shuffle(std::span<std::string>(who.idiolect));
    who.idiolect.resize(p_.idiolect_words);
    std::vector<std::string> tags = topic_tags_[who.topic];
    rng_.shuffle(std::span<std::string>(tags));
    tags.resize(std::min<size_t>(3, tags.size()));
    who.hashtags = tags;
    who.low_activity = rng_.bernoulli(p_.low_activity);
    if (i < linked) {
      who.on_twitter = who.on_instagram = true;
    } else {
      (((i - linked) % 2 == 0) ? who.on_twitter : who.on_instagram) = true;
    }
  }

  // Friends come mostly from the same topic.
  std::vector<std::vector<size_t>> by_topic(p_.topics);
  for (size_t i = 0; i < n; ++i) by_topic[personas_[i].topic].push_back(i);
  for (size_t i = 0; i < n; ++i) {
    Persona& who = personas_[i];
    std::set<size_t> chosen;
    size_t attempts = 0;
    while (chosen.size() < p_.friends && attempts++ < 50 * p_.friends) {
      const auto& pool = by_topic[who.topic];
      const size_t f = (rng_.bernoulli(0.75) && pool.size() > 1) ? pool[rng_.below(pool.size())] : rng_.below(n);
      if (f != i) chosen.insert(f);
    }
    who.friends.assign(chosen.begin(), chosen.end());
  }

  for (size_t i = 0; i < n; ++i) {
    Persona& who = personas_[i];
    const std::string base = base_username(who);
    if (who.on_twitter) who.twitter_username = claim(base);
    if (who.on_instagram) {
      if (who.on_twitter) {
        who.noise = draw_noise();
        std::string ig = perturb_username(who, who.twitter_username, who.noise);
        if (who.noise == UsernameNoise::identical) {
          who.instagram_username = ig;
        } else {
          if (ig == who.twitter_username) ig += "_";
          who.instagram_username = claim(ig);
        }
      } else {
        who.instagram_username = claim(base);
      }
    }
    const std::string plain = who.first + " " + who.last;
    if (who.on_twitter && !rng_.bernoulli(p_.name.missing)) who.twitter_name = plain;
    if (who.on_instagram && !rng_.bernoulli(p_.name.missing)) {
      who.instagram_name = who.on_twitter ? noisy_full_name(who) : plain;
      if (rng_.bernoulli(p_.name.decoration)) who.instagram_name = decorated(*who.instagram_name);
    }
  }

  // Account ids are assigned in a shuffled order so they carry no linkage.
  auto assign_ids = [&](const char* prefix, auto member) {
    std::vector<size_t> order;
    for (size_t i = 0; i < n; ++i)
      if (personas_[i].*member) order.push_back(i);
    rng_.shuffle(std::span<size_t>(order));
    std::vector<std::string> ids(n);
    for (size_t k = 0; k < order.size(); ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "%s%06zu", prefix, k + 1);
      ids[order[k]] = id;
    }
    return ids;
  };
  twitter_ids_ = assign_ids("tw", &Persona::on_twitter);
  instagram_ids_ = assign_ids("ig", &Persona::on_instagram);

  SynthCorpus corpus;
  for (size_t i = 0; i < n; ++i) {
    if (personas_[i].on_twitter) emit_posts(i, Domain::twitter, corpus.twitter);
    if (personas_[i].on_instagram) emit_posts(i, Domain::instagram, corpus.instagram);
  }

  // Self-reported links: mostly on the Twitter side, sometimes both.
  std::map<std::string, size_t> first_tw, first_ig;
  for (size_t k = 0; k < corpus.twitter.size(); ++k) first_tw.emplace(corpus.twitter[k].user_id, k);
  for (size_t k = 0; k < corpus.instagram.size(); ++k) first_ig.emplace(corpus.instagram[k].user_id, k);
  for (size_t i = 0; i < linked; ++i) {
    const Persona& who = personas_[i];
    bool tw_side = rng_.bernoulli(0.8);
    const bool ig_side = rng_.bernoulli(0.5);
    if (!tw_side && !ig_side) tw_side = true;
    if (tw_side) corpus.twitter[first_tw.at(twitter_ids_[i])].link_target = who.instagram_username;
    if (ig_side) corpus.instagram[first_ig.at(instagram_ids_[i])].link_target = who.twitter_username;
    corpus.truth.push_back({twitter_ids_[i], instagram_ids_[i], who.twitter_username, who.instagram_username, who.noise});
  }
  std::sort(corpus.truth.begin(), corpus.truth.end(),
            [](const SynthLink& a, const SynthLink& b) { return a.twitter_user < b.twitter_user; });
  return corpus;
}

}  // namespace

SynthCorpus synth_corpus(const SynthParams& params) {
  params.validate();
  return Generator(params).run();
}

void write_truth_tsv(std::ostream& out, const std::vector<SynthLink>& truth) {
  out << "twitter_user\tinstagram_user\ttwitter_username\tinstagram_username\tusername_noise\n";
  for (const auto& l : truth)
    out << l.twitter_user << '\t' << l.instagram_user << '\t' << l.twitter_username << '\t' << l.instagram_username
        << '\t' << to_string(l.noise) << '\n';
}

}  // namespace crossres::synth
