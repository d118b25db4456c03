#include "crossres/normalize.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

#include "crossres/unicode.h"

namespace crossres::normalize {
namespace {

std::u32string apply_icu(const icu::Normalizer2* (*instance)(UErrorCode&),
                         const std::u32string& text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = instance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()), static_cast<int32_t>(text.size()));
  icu::UnicodeString result = normalizer->normalize(source, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  std::u32string out(static_cast<size_t>(result.countChar32()), U'\0');
  status = U_ZERO_ERROR;
  result.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
  return out;
}

bool is_emoji(char32_t c) {
  const auto cp = static_cast<UChar32>(c);
  if (c == 0x200D || c == 0x20E3 || c == 0xFE0E || c == 0xFE0F) return true;
  if (c >= 0xE0020 && c <= 0xE007F) return true;  // emoji tag sequences
  return u_hasBinaryProperty(cp, UCHAR_EXTENDED_PICTOGRAPHIC) ||
         u_hasBinaryProperty(cp, UCHAR_EMOJI_MODIFIER) ||
         u_hasBinaryProperty(cp, UCHAR_REGIONAL_INDICATOR);
}

bool is_mark(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

bool is_control(char32_t c) {
  if (unicode::is_whitespace(c)) return false;
  const int8_t type = u_charType(static_cast<UChar32>(c));
  return type == U_CONTROL_CHAR || type == U_FORMAT_CHAR;
}

bool is_word_char(char32_t c) { return u_isalnum(static_cast<UChar32>(c)); }

bool is_ascii_alpha(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

// Removes <tag ...> elements and character entities, replacing each with a
// space, then drops any stray angle brackets.
std::u32string strip_markup(const std::u32string& s) {
  constexpr size_t kMaxTag = 256;
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const char32_t c = s[i];
    if (c == U'<' && i + 1 < s.size() &&
        (is_ascii_alpha(s[i + 1]) || s[i + 1] == U'/' || s[i + 1] == U'!')) {
      size_t j = i + 1;
      while (j < s.size() && j - i < kMaxTag && s[j] != U'>' && s[j] != U'<') ++j;
      if (j < s.size() && s[j] == U'>') {
        out.push_back(U' ');
        i = j + 1;
        continue;
      }
    }
    if (c == U'&') {
      size_t j = i + 1;
      if (j < s.size() && s[j] == U'#') {
        ++j;
        const bool hex = j < s.size() && (s[j] == U'x' || s[j] == U'X');
        if (hex) ++j;
        const size_t start = j;
        while (j < s.size() && j - start < 8 &&
               ((s[j] >= U'0' && s[j] <= U'9') ||
                (hex && ((s[j] >= U'a' && s[j] <= U'f') || (s[j] >= U'A' && s[j] <= U'F')))))
          ++j;
        if (j > start && j < s.size() && s[j] == U';') {
          out.push_back(U' ');
          i = j + 1;
          continue;
        }
      } else {
        const size_t start = j;
        while (j < s.size() && j - start < 10 && is_ascii_alpha(s[j])) ++j;
        if (j - start >= 2 && j < s.size() && s[j] == U';') {
          out.push_back(U' ');
          i = j + 1;
          continue;
        }
      }
    }
    out.push_back(c == U'<' || c == U'>' ? U' ' : c);
    ++i;
  }
  return out;
}

std::u32string strip_emoticons(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (unicode::is_whitespace(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    size_t j = i;
    while (j < s.size() && !unicode::is_whitespace(s[j])) ++j;
    const std::u32string_view token(s.data() + i, j - i);
    if (std::find(kEmoticons.begin(), kEmoticons.end(), token) != kEmoticons.end()) {
      out.push_back(U' ');
    } else {
      out.append(token);
    }
    i = j;
  }
  return out;
}

std::u32string strip_punctuation(const std::u32string& s) {
  std::u32string out(s.size(), U' ');
  for (size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (c == U'\'' || c == U'’') {
      const bool inside = i > 0 && i + 1 < s.size() && is_word_char(s[i - 1]) && is_word_char(s[i + 1]);
      out[i] = inside ? U'\'' : U' ';
    } else if (!u_ispunct(static_cast<UChar32>(c))) {
      out[i] = c;
    }
  }
  return out;
}

std::u32string fold_whitespace(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending = false;
  for (char32_t c : s) {
    if (unicode::is_whitespace(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::u32string collapse_repeats(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    const size_t n = out.size();
    if (n >= 2 && out[n - 1] == c && out[n - 2] == c) continue;
    out.push_back(c);
  }
  return out;
}

void lowercase_in_place(std::u32string& s) {
  for (char32_t& c : s) c = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

std::u32string trim(std::u32string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && unicode::is_whitespace(s[b])) ++b;
  while (e > b && unicode::is_whitespace(s[e - 1])) --e;
  return std::u32string(s.substr(b, e - b));
}

}  // namespace

std::string reorder_full_name(std::string_view input) {
  const std::u32string s = unicode::decode_utf8(input);
  const size_t comma = s.find(U',');
  if (comma == std::u32string::npos || s.find(U',', comma + 1) != std::u32string::npos)
    return std::string(input);
  const std::u32string last = trim(std::u32string_view(s).substr(0, comma));
  const std::u32string first = trim(std::u32string_view(s).substr(comma + 1));
  if (last.empty() || first.empty()) return std::string(input);
  return unicode::encode_utf8(first + U' ' + last);
}

std::string lowercase(std::string_view input) {
  std::u32string s = unicode::decode_utf8(input);
  lowercase_in_place(s);
  return unicode::encode_utf8(s);
}

std::string normalize_text(std::string_view input, const NormalizationConfig& config) {
  std::u32string s = config.reorder_full_name ? unicode::decode_utf8(reorder_full_name(input))
                                              : unicode::decode_utf8(input);
  if (config.apply_norm) {
    s = apply_icu(&icu::Normalizer2::getNFKDInstance, s);
    std::erase_if(s, [](char32_t c) { return is_mark(c) || is_emoji(c) || is_control(c); });
    s = apply_icu(&icu::Normalizer2::getNFCInstance, s);
    s = strip_markup(s);
    s = strip_emoticons(s);
    s = strip_punctuation(s);
    s = fold_whitespace(s);
  }
  if (config.apply_lowercase) lowercase_in_place(s);
  if (config.apply_norm) s = collapse_repeats(s);
  return unicode::encode_utf8(s);
}

}  // namespace crossres::normalize
