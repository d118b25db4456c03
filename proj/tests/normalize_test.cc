#include "crossres/normalize.h"

#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "crossres/random.h"
#include "crossres/unicode.h"

namespace crossres::normalize {
namespace {

constexpr NormalizationConfig kNormLower{true, true, false};

// Rule oracle over a small alphabet: ASCII letters and punctuation, a few
// precomposed Latin letters and emoji. Mirrors the stated stages one by one
// without Unicode tables.
std::u32string oracle(std::u32string s, bool lower) {
  static const std::map<char32_t, char32_t> kFold = {{U'é', U'e'}, {U'è', U'e'}, {U'É', U'E'},
                                                     {U'ñ', U'n'}, {U'ü', U'u'}, {U'Å', U'A'}};
  std::u32string t;
  for (char32_t c : s) {
    if (c == U'👋' || c == U'😀') continue;
    auto it = kFold.find(c);
    t.push_back(it == kFold.end() ? c : it->second);
  }
  // Emoticon tokens.
  std::vector<std::u32string> tokens;
  std::u32string cur;
  std::u32string spaced;
  for (size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == U' ') {
      const bool emoticon = cur == U":)" || cur == U":-)" || cur == U":(" || cur == U";)" || cur == U":D" ||
                            cur == U":P";
      spaced += emoticon ? std::u32string(U" ") : cur;
      if (i < t.size()) spaced += U' ';
      cur.clear();
    } else {
      cur.push_back(t[i]);
    }
  }
  auto word = [](char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9'); };
  auto punct = [](char32_t c) { return std::u32string_view(U"!?.,;:-()\"'").find(c) != std::u32string_view::npos; };
  std::u32string p;
  for (size_t i = 0; i < spaced.size(); ++i) {
    const char32_t c = spaced[i];
    if (c == U'\'') {
      p.push_back(i > 0 && i + 1 < spaced.size() && word(spaced[i - 1]) && word(spaced[i + 1]) ? U'\'' : U' ');
    } else {
      p.push_back(punct(c) ? U' ' : c);
    }
  }
  std::u32string f;
  for (char32_t c : p) {
    if (c == U' ' && (f.empty() || f.back() == U' ')) continue;
    f.push_back(c);
  }
  while (!f.empty() && f.back() == U' ') f.pop_back();
  if (lower)
    for (auto& c : f)
      if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
  std::u32string out;
  for (char32_t c : f) {
    const size_t n = out.size();
    if (n >= 2 && out[n - 1] == c && out[n - 2] == c) continue;
    out.push_back(c);
  }
  return out;
}

std::string utf8(const std::u32string& s) { return unicode::encode_utf8(s); }

TEST(NormalizeText, CollapsesLongRepeats) { EXPECT_EQ(normalize_text("cooooool", kNormLower), "cool"); }

TEST(NormalizeText, EmptyIsFixedPoint) {
  for (bool a : {false, true})
    for (bool b : {false, true})
      for (bool c : {false, true}) EXPECT_EQ(normalize_text("", {a, b, c}), "");
}

TEST(NormalizeText, StripsDiacriticsEmojiAndPunctuation) {
  EXPECT_EQ(normalize_text("Héllo👋!!", kNormLower), "hello");
  EXPECT_EQ(normalize_text("Héllo👋!!", kNormLower), utf8(oracle(U"Héllo👋!!", true)));
}

TEST(NormalizeText, KeepsWordInternalApostrophes) {
  EXPECT_EQ(normalize_text("Don't stop 'til", kNormLower), "don't stop til");
  EXPECT_EQ(normalize_text("rock’n roll", kNormLower), "rock'n roll");
}

TEST(NormalizeText, RemovesStandaloneEmoticonsOnly) {
  EXPECT_EQ(normalize_text("great :) day :D", kNormLower), "great day");
  EXPECT_EQ(normalize_text("a:)b", kNormLower), "a b");
}

TEST(NormalizeText, RemovesMarkupAndEntities) {
  EXPECT_EQ(normalize_text("<b>bold</b>&amp;text", kNormLower), "bold text");
  EXPECT_EQ(normalize_text("x &#39; y", kNormLower), "x y");
  EXPECT_EQ(normalize_text("1 < 2", kNormLower), "1 2");
}

TEST(NormalizeText, CompatibilityForms) {
  EXPECT_EQ(normalize_text("ﬁne ＡＢＣ", kNormLower), "fine abc");
  EXPECT_EQ(normalize_text("Ångström", kNormLower), "angstrom");
}

TEST(NormalizeText, FlagsAreIndependent) {
  EXPECT_EQ(normalize_text("Héllo!!", {false, false, false}), "Héllo!!");
  EXPECT_EQ(normalize_text("Héllo!!", {false, true, false}), "héllo!!");
  EXPECT_EQ(normalize_text("Héllo!!", {true, false, false}), "Hello");
  EXPECT_EQ(normalize_text("Smith, Bob", {false, false, true}), "Bob Smith");
  EXPECT_EQ(normalize_text("Smith, Bob", {true, true, true}), "bob smith");
}

TEST(NormalizeText, MatchesRuleOracleOnRandomStrings) {
  const std::u32string alphabet = U"aAbBoOzZ09 '!?.,;:-()\"éèÉñüÅ👋😀DP";
  Rng rng(11);
  for (int trial = 0; trial < 5000; ++trial) {
    std::u32string s;
    const size_t len = rng.below(16);
    for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    for (bool lower : {false, true}) {
      const NormalizationConfig config{true, lower, false};
      ASSERT_EQ(normalize_text(utf8(s), config), utf8(oracle(s, lower))) << utf8(s);
    }
  }
}

std::u32string random_text(Rng& rng) {
  static const std::u32string alphabet =
      U"aAbBcCxX  \t\n'’!?.,:;-()<>&#/ŒœßǅĲﬁé́̈ÅΣσςДд中😀👋🏽‍️12:)";
  std::u32string s;
  const size_t len = rng.below(24);
  for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  return s;
}

TEST(NormalizeTextProperty, IdempotentForAllConfigs) {
  Rng rng(5);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string s = utf8(random_text(rng));
    for (int mask = 0; mask < 8; ++mask) {
      const NormalizationConfig c{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
      const std::string once = normalize_text(s, c);
      ASSERT_EQ(normalize_text(once, c), once) << s << " mask=" << mask;
    }
  }
}

TEST(NormalizeTextProperty, NoTripleRunsUnderNorm) {
  Rng rng(6);
  for (int trial = 0; trial < 3000; ++trial) {
    std::u32string s = random_text(rng);
    s += std::u32string(3 + rng.below(5), U'o');
    for (bool lower : {false, true}) {
      const auto out = unicode::decode_utf8(normalize_text(utf8(s), {true, lower, false}));
      for (size_t i = 2; i < out.size(); ++i)
        ASSERT_FALSE(out[i] == out[i - 1] && out[i] == out[i - 2]) << utf8(s);
    }
  }
}

TEST(NormalizeTextProperty, LowercaseLeavesNoUppercase) {
  Rng rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string s = utf8(random_text(rng));
    for (bool norm : {false, true}) {
      const std::string out = normalize_text(s, {norm, true, false});
      ASSERT_EQ(lowercase(out), out) << s;
    }
  }
}

TEST(NormalizeTextProperty, Deterministic) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string s = utf8(random_text(rng));
    EXPECT_EQ(normalize_text(s, kNormLower), normalize_text(s, kNormLower));
  }
}

TEST(NormalizeText, AcceptsIllFormedUtf8) {
  const std::string bad = "ab\xff\xfe" "c\xc3";
  const std::string out = normalize_text(bad, kNormLower);
  EXPECT_EQ(unicode::sanitize_utf8(out), out);
}

TEST(ReorderFullName, SwapsSingleCommaNames) {
  EXPECT_EQ(reorder_full_name("Smith, Bob"), "Bob Smith");
  EXPECT_EQ(reorder_full_name("  Smith ,   Bob  "), "Bob Smith");
}

TEST(ReorderFullName, LeavesOtherShapesUnchanged) {
  EXPECT_EQ(reorder_full_name("Bob Smith"), "Bob Smith");
  EXPECT_EQ(reorder_full_name("a, b, c"), "a, b, c");
  EXPECT_EQ(reorder_full_name(", Bob"), ", Bob");
  EXPECT_EQ(reorder_full_name("Smith,"), "Smith,");
  EXPECT_EQ(reorder_full_name(""), "");
}

// Single-comma rule oracle: split on commas, swap only when there are exactly
// two non-blank parts.
std::string reorder_oracle(const std::string& s) {
  std::vector<std::string> parts{""};
  for (char c : s) {
    if (c == ',') parts.emplace_back();
    else parts.back() += c;
  }
  auto trim = [](std::string x) {
    while (!x.empty() && x.front() == ' ') x.erase(x.begin());
    while (!x.empty() && x.back() == ' ') x.pop_back();
    return x;
  };
  if (parts.size() != 2 || trim(parts[0]).empty() || trim(parts[1]).empty()) return s;
  return trim(parts[1]) + " " + trim(parts[0]);
}

TEST(ReorderFullName, MatchesOracleOnRandomStrings) {
  Rng rng(9);
  const std::string alphabet = "ab ,";
  for (int trial = 0; trial < 5000; ++trial) {
    std::string s;
    const size_t len = rng.below(9);
    for (size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    ASSERT_EQ(reorder_full_name(s), reorder_oracle(s)) << '"' << s << '"';
  }
}

}  // namespace
}  // namespace crossres::normalize
