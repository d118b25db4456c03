#ifndef CROSSRES_NORMALIZE_H_
#define CROSSRES_NORMALIZE_H_

#include <array>
#include <string>
#include <string_view>

namespace crossres::normalize {

// The three stages are independent; every combination is valid.
struct NormalizationConfig {
  bool apply_norm = true;
  bool apply_lowercase = true;
  bool reorder_full_name = false;
};

// ASCII emoticons removed by the norm stage. They are only removed when they
// stand alone as a whitespace-delimited token.
inline constexpr std::array<std::u32string_view, 6> kEmoticons = {
    U":)", U":-)", U":(", U";)", U":D", U":P"};

// Normalizes profile or post text. Stage order: optional full-name reordering,
// then (norm) NFKD, removal of combining marks, emoji, control characters,
// markup, emoticons and punctuation other than word-internal apostrophes,
// whitespace folding and NFC recomposition; then lowercasing; then (norm)
// collapsing of every run of three or more identical characters to two.
//
// Idempotent for every config. Never fails; ill-formed UTF-8 input is read
// with U+FFFD substitution.
std::string normalize_text(std::string_view input, const NormalizationConfig& config);

// "<A>, <B>" with exactly one comma and two non-empty segments becomes
// "<B> <A>". Anything else is returned unchanged.
std::string reorder_full_name(std::string_view input);

// Lowercases scalar by scalar (simple case mapping, no locale rules).
std::string lowercase(std::string_view input);

}  // namespace crossres::normalize

#endif  // CROSSRES_NORMALIZE_H_
