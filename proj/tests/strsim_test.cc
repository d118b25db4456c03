#include "crossres/strsim.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "crossres/errors.h"
#include "crossres/random.h"
#include "crossres/unicode.h"
#include "strsim_oracles.h"

namespace crossres::strsim {
namespace {

using namespace crossres::testing;

// Textbook Jaro written from the definition: flag matches inside the window,
// then count positions where the matched subsequences disagree.
double jaro_oracle(const std::u32string& s, const std::u32string& t) {
  if (s.empty() && t.empty()) return 1.0;
  if (s.empty() || t.empty()) return 0.0;
  const int window = std::max(0, static_cast<int>(std::max(s.size(), t.size()) / 2) - 1);
  std::vector<bool> ms(s.size()), mt(t.size());
  int m = 0;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    for (int j = std::max(0, i - window); j <= std::min(static_cast<int>(t.size()) - 1, i + window); ++j) {
      if (!mt[j] && s[i] == t[j]) {
        ms[i] = mt[j] = true;
        ++m;
        break;
      }
    }
  }
  if (m == 0) return 0.0;
  std::u32string ss, tt;
  for (size_t i = 0; i < s.size(); ++i)
    if (ms[i]) ss.push_back(s[i]);
  for (size_t j = 0; j < t.size(); ++j)
    if (mt[j]) tt.push_back(t[j]);
  int half = 0;
  for (size_t k = 0; k < ss.size(); ++k) half += ss[k] != tt[k];
  const double md = m;
  return (md / s.size() + md / t.size() + (md - half / 2.0) / md) / 3.0;
}

std::u32string random_string(Rng& rng, std::u32string_view alphabet, size_t max_len) {
  std::u32string s;
  const size_t len = rng.below(max_len + 1);
  for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  return s;
}

TEST(LossyBw, PublishedRotationExample) {
  EXPECT_EQ(lossy_bw_transform("@smithbobt"), "@hotmsbtib");
  EXPECT_EQ(lossy_bw_transform("@bobtsmith"), "@hotmsbtib");
  // Not a rotation of the name, so the transform tells it apart.
  EXPECT_EQ(lossy_bw_transform("@tbobsmith"), "@totmsbbhi");
}

TEST(LossyBw, SigilAnchorsRotation) {
  EXPECT_EQ(lossy_bw_transform("bob@"), "@" + lossy_bw_transform("bob"));
  EXPECT_EQ(lossy_bw_transform("ob@b"), lossy_bw_transform("@bob"));
  EXPECT_EQ(lossy_bw_transform("@a@b"), "ba@@");
  EXPECT_EQ(lossy_bw_transform(U"@ab"), bw_oracle(U"@ab"));
}

TEST(LossyBw, SmallCases) {
  EXPECT_EQ(lossy_bw_transform("aaa"), "aaa");
  EXPECT_EQ(lossy_bw_transform("ab"), "ba");
  EXPECT_EQ(lossy_bw_transform(""), "");
  EXPECT_EQ(lossy_bw_transform(U"ab"), bw_oracle(U"ab"));
}

TEST(LossyBw, MatchesRotationSortOracle) {
  for (const auto& s : all_strings(U"abc@", 6)) ASSERT_EQ(lossy_bw_transform(s), bw_oracle(s));
}

TEST(LossyBw, PermutationAndLengthPreserved) {
  Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const auto s = random_string(rng, U"abcé中@", 12);
    auto out = lossy_bw_transform(s);
    ASSERT_EQ(out.size(), s.size());
    auto sorted_in = s;
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(out.begin(), out.end());
    ASSERT_EQ(out, sorted_in);
  }
}

TEST(LossyBw, RotationInvariantExhaustivelyUpToLengthEight) {
  for (const auto& s : all_strings(U"abc@", 8)) {
    const auto expected = lossy_bw_transform(s);
    for (size_t r = 1; r < s.size(); ++r) ASSERT_EQ(lossy_bw_transform(s.substr(r) + s.substr(0, r)), expected);
  }
}

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein(U"kitten", U"sitting"), 3u);
  EXPECT_EQ(levenshtein(U"x", U"x"), 0u);
  EXPECT_EQ(levenshtein(U"", U"abc"), 3u);
}

TEST(DamerauLevenshtein, Examples) {
  EXPECT_EQ(damerau_levenshtein(U"ab", U"ba"), 1u);
  EXPECT_EQ(damerau_levenshtein(U"abcd", U"abcd"), 0u);
  EXPECT_EQ(damerau_levenshtein(U"abcd", U"abdc"), 1u);
  // Restricted variant: the transposed pair cannot be edited again.
  EXPECT_EQ(damerau_levenshtein(U"ca", U"abc"), 3u);
}

TEST(EditDistance, MatchesBruteForceSearchUpToLengthFive) {
  const auto strings = all_strings(U"abc", 5);
  for (const auto& a : strings) {
    const auto lev = edit_bfs(a, U"abc", 5, false);
    const auto dl = edit_bfs(a, U"abc", 5, true);
    for (const auto& b : strings) {
      ASSERT_EQ(levenshtein(a, b), lev.at(b)) << unicode::encode_utf8(a) << " " << unicode::encode_utf8(b);
      const size_t osa = damerau_levenshtein(a, b);
      ASSERT_EQ(osa, osa_oracle(a, b));
      // Unrestricted transposition search is a lower bound for the restricted variant.
      ASSERT_LE(dl.at(b), osa);
      ASSERT_LE(osa, lev.at(b));
    }
  }
}

TEST(EditDistance, SymmetricAndZeroOnlyOnIdentity) {
  Rng rng(2);
  for (int k = 0; k < 5000; ++k) {
    const auto a = random_string(rng, U"abcd", 9), b = random_string(rng, U"abcd", 9);
    ASSERT_EQ(levenshtein(a, b), levenshtein(b, a));
    ASSERT_EQ(damerau_levenshtein(a, b), damerau_levenshtein(b, a));
    ASSERT_EQ(levenshtein(a, b) == 0, a == b);
    ASSERT_LE(damerau_levenshtein(a, b), levenshtein(a, b));
  }
}

TEST(NormalizedEditSimilarity, Examples) {
  EXPECT_NEAR(normalized_edit_similarity(U"ab", U"cd", EditKind::lev), 1.0 - 4.0 / 6.0, 1e-15);
  EXPECT_EQ(normalized_edit_similarity(U"abc", U"abc", EditKind::lev), 1.0);
  EXPECT_EQ(normalized_edit_similarity(U"", U"", EditKind::lev), 1.0);
  EXPECT_EQ(normalized_edit_similarity(U"", U"abc", EditKind::dl), 0.0);
}

TEST(NormalizedEditSimilarity, TriangleInequalityOnRandomTriples) {
  Rng rng(3);
  auto nd = [](const std::u32string& x, const std::u32string& y) {
    return 1.0 - normalized_edit_similarity(x, y, EditKind::lev);
  };
  for (int k = 0; k < 10000; ++k) {
    const auto a = random_string(rng, U"abc", 8), b = random_string(rng, U"abc", 8), c = random_string(rng, U"abc", 8);
    ASSERT_LE(nd(a, c), nd(a, b) + nd(b, c) + 1e-12);
  }
}

TEST(Jaro, ClassicExample) {
  EXPECT_NEAR(jaro(U"martha", U"marhta"), 17.0 / 18.0, 1e-12);
  EXPECT_NEAR(jaro_winkler(U"martha", U"marhta"), 17.0 / 18.0 + 0.3 * (1.0 / 18.0), 1e-12);
  EXPECT_NEAR(jaro(U"martha", U"marhta"), 0.9444, 1e-4);
  EXPECT_NEAR(jaro_winkler(U"martha", U"marhta"), 0.9611, 1e-4);
}

TEST(Jaro, IdentityAndDisjoint) {
  EXPECT_EQ(jaro(U"abc", U"abc"), 1.0);
  EXPECT_EQ(jaro_winkler(U"abc", U"abc"), 1.0);
  EXPECT_EQ(jaro(U"abc", U"xyz"), 0.0);
  EXPECT_EQ(jaro_winkler(U"abc", U"xyz"), 0.0);
  EXPECT_EQ(jaro(U"", U""), 1.0);
  EXPECT_EQ(jaro(U"", U"a"), 0.0);
}

TEST(Jaro, MatchesReferenceImplementation) {
  Rng rng(4);
  for (int k = 0; k < 20000; ++k) {
    const auto a = random_string(rng, U"abcde", 10), b = random_string(rng, U"abcde", 10);
    ASSERT_NEAR(jaro(a, b), jaro_oracle(a, b), 1e-12);
  }
}

TEST(Jaro, SymmetricInRangeAndOneOnlyForEqual) {
  Rng rng(5);
  for (int k = 0; k < 20000; ++k) {
    const auto a = random_string(rng, U"abc", 9), b = random_string(rng, U"abc", 9);
    for (auto f : {+[](std::u32string_view x, std::u32string_view y) { return jaro(x, y); },
                   +[](std::u32string_view x, std::u32string_view y) { return jaro_winkler(x, y); }}) {
      const double s = f(a, b);
      ASSERT_EQ(s, f(b, a)) << unicode::encode_utf8(a) << " " << unicode::encode_utf8(b);
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
      if (!a.empty() || !b.empty()) {
        ASSERT_EQ(s == 1.0, a == b);
      }
    }
  }
}

TEST(SoftTfidf, Examples) {
  TokenStats stats;
  for (const char* doc : {"bob smith", "alice smith", "xavier jones", "bob jones"}) stats.add_document(doc);
  EXPECT_DOUBLE_EQ(soft_tfidf("bob", "bob", stats).value, 1.0);
  EXPECT_EQ(soft_tfidf("bob", "xavier", stats).value, 0.0);
  EXPECT_DOUBLE_EQ(soft_tfidf("bob smith", "smith bob", stats).value, 1.0);
  EXPECT_DOUBLE_EQ(soft_tfidf("bob", "bob", TokenStats{}).value, 1.0);
}

TEST(SoftTfidf, EmptyTokenListIsDegenerate) {
  TokenStats stats;
  const auto s = soft_tfidf("", "bob", stats);
  EXPECT_EQ(s.value, 0.0);
  EXPECT_TRUE(s.degenerate);
  EXPECT_TRUE(soft_tfidf("   ", "", stats).degenerate);
}

TEST(SoftTfidf, TwoTokenHandOracle) {
  TokenStats stats;
  for (const char* doc : {"bob smith", "bob jones", "ann smyth", "carl doe"}) stats.add_document(doc);
  // "bob smith" vs "bob smithe": bob matches bob exactly, smith best-matches
  // smithe with JW above the threshold.
  const double n = 4;
  auto idf = [&](double df) { return std::log((n + 1) / (df + 1)) + 1; };
  const double w_bob = std::log(2.0) * idf(2), w_smith = std::log(2.0) * idf(1), w_smithe = std::log(2.0) * idf(0);
  const double na = std::sqrt(w_bob * w_bob + w_smith * w_smith);
  const double nb = std::sqrt(w_bob * w_bob + w_smithe * w_smithe);
  const double jw = jaro_winkler(U"smith", U"smithe");
  ASSERT_GE(jw, kSoftTfidfThreshold);
  const double expected = (w_bob * w_bob + w_smith * w_smithe * jw) / (na * nb);
  EXPECT_NEAR(soft_tfidf("bob smith", "bob smithe", stats).value, expected, 1e-12);
}

TEST(SoftTfidf, SymmetricAndInRange) {
  TokenStats stats;
  Rng rng(6);
  std::vector<std::string> docs;
  for (int k = 0; k < 300; ++k) {
    std::string d;
    const size_t tokens = 1 + rng.below(3);
    for (size_t t = 0; t < tokens; ++t) {
      if (t) d += ' ';
      d += unicode::encode_utf8(random_string(rng, U"abcde", 5)) + "x";
    }
    docs.push_back(d);
    stats.add_document(d);
  }
  for (size_t k = 0; k + 1 < docs.size(); ++k) {
    const double s = soft_tfidf(docs[k], docs[k + 1], stats).value;
    ASSERT_EQ(s, soft_tfidf(docs[k + 1], docs[k], stats).value);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    ASSERT_DOUBLE_EQ(soft_tfidf(docs[k], docs[k], stats).value, 1.0);
  }
}

TEST(TokenStats, SmoothedIdf) {
  TokenStats stats;
  stats.add_document("a b");
  stats.add_document("a a");
  EXPECT_EQ(stats.documents(), 2u);
  EXPECT_EQ(stats.document_frequency("a"), 2u);
  EXPECT_EQ(stats.document_frequency("b"), 1u);
  EXPECT_DOUBLE_EQ(stats.idf("a"), 1.0);
  EXPECT_DOUBLE_EQ(stats.idf("z"), std::log(3.0) + 1.0);
}

TEST(PipelineSpec, ParseAndPrint) {
  const auto s = PipelineSpec::parse("jw,nonorm,lower,bw");
  EXPECT_FALSE(s.norm);
  EXPECT_TRUE(s.lower);
  EXPECT_TRUE(s.bw);
  EXPECT_EQ(s.metric, Metric::jaro_winkler);
  EXPECT_EQ(s.to_string(), "jw,nonorm,lower,bw");
  for (const char* id : {"jaro,norm,nolower,nobw", "nl,nonorm,nolower,nobw", "ndl,norm,lower,bw"})
    EXPECT_EQ(PipelineSpec::parse(id).to_string(), id);
  EXPECT_EQ(PipelineSpec::parse("soft-tfidf").to_string(), "soft-tfidf,norm,lower,nobw");
}

TEST(PipelineSpec, RejectsBadIds) {
  EXPECT_THROW(PipelineSpec::parse("soft-tfidf,bw"), ConfigError);
  EXPECT_THROW(PipelineSpec::parse("norm,lower"), ConfigError);
  EXPECT_THROW(PipelineSpec::parse("jw,shout"), ConfigError);
  EXPECT_THROW(PipelineSpec::parse("jw,jaro"), ConfigError);
}

TEST(ProfileSimilarity, PublishedBwExample) {
  const auto spec = PipelineSpec::parse("jw,nonorm,lower,bw");
  EXPECT_EQ(profile_similarity("@smithbobt", "@bobtsmith", spec).value, 1.0);
  EXPECT_EQ(profile_similarity("smithbobt", "bobtsmith", spec).value, 1.0);
  EXPECT_LT(profile_similarity("@smithbobt", "@bobtsmith", PipelineSpec::parse("jw,nonorm,lower,nobw")).value, 1.0);
}

TEST(ProfileSimilarity, FullNameReorder) {
  const auto spec = PipelineSpec::parse("jw,norm,lower,nobw");
  EXPECT_EQ(profile_similarity("Smith, Bob", "bob smith", spec, Field::full_name).value, 1.0);
  // Usernames are never reordered.
  EXPECT_LT(profile_similarity("Smith, Bob", "bob smith", spec, Field::username).value, 1.0);
}

TEST(ProfileSimilarity, IdentityForEveryPipeline) {
  TokenStats stats;
  stats.add_document("bob smith");
  for (const char* metric : {"jaro", "jw", "nl", "ndl"})
    for (const char* norm : {"norm", "nonorm"})
      for (const char* lower : {"lower", "nolower"})
        for (const char* bw : {"bw", "nobw"}) {
          const auto spec = PipelineSpec::parse(std::string(metric) + "," + norm + "," + lower + "," + bw);
          for (const char* s : {"Bob Smith", "x", "@tbobsmith"})
            EXPECT_EQ(profile_similarity(s, s, spec, Field::full_name, &stats).value, 1.0) << spec.to_string();
        }
  EXPECT_DOUBLE_EQ(profile_similarity("Bob Smith", "Bob Smith", PipelineSpec::parse("soft-tfidf"), Field::full_name,
                                      &stats)
                       .value,
                   1.0);
}

TEST(ProfileSimilarity, AllMetricsSymmetricOnRandomPairs) {
  TokenStats stats;
  Rng rng(7);
  std::vector<std::string> pool;
  for (int k = 0; k < 200; ++k) {
    pool.push_back(unicode::encode_utf8(random_string(rng, U"abAB é,", 10)));
    stats.add_document(pool.back());
  }
  for (const char* id : {"jaro,nonorm,lower,nobw", "jw,norm,lower,bw", "nl,norm,nolower,nobw", "ndl,nonorm,lower,bw",
                         "soft-tfidf"}) {
    const auto spec = PipelineSpec::parse(id);
    for (size_t k = 0; k + 1 < pool.size(); ++k) {
      const auto ab = profile_similarity(pool[k], pool[k + 1], spec, Field::full_name, &stats).value;
      const auto ba = profile_similarity(pool[k + 1], pool[k], spec, Field::full_name, &stats).value;
      ASSERT_EQ(ab, ba) << id;
      ASSERT_GE(ab, 0.0);
      ASSERT_LE(ab, 1.0);
    }
  }
}

}  // namespace
}  // namespace crossres::strsim
