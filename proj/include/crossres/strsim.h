#ifndef CROSSRES_STRSIM_H_
#define CROSSRES_STRSIM_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crossres::strsim {

enum class Metric { jaro, jaro_winkler, norm_levenshtein, norm_damerau_levenshtein, soft_tfidf };

enum class EditKind { lev, dl };

// Full-name reordering is part of the norm stage for full names only.
enum class Field { username, full_name };

// One profile comparison system, e.g. "jw,nonorm,lower,bw" or "soft-tfidf".
// Metric tokens: jaro, jw, nl, ndl, soft-tfidf. Stage tokens: norm/nonorm,
// lower/nolower, bw/nobw. soft-tfidf defaults to norm,lower,nobw.
struct PipelineSpec {
  bool norm = false;
  bool lower = true;
  bool bw = false;
  Metric metric = Metric::jaro_winkler;

  // Throws ConfigError on unknown tokens or soft-tfidf combined with bw.
  static PipelineSpec parse(std::string_view id);
  std::string to_string() const;
  void validate() const;
};

struct Similarity {
  double value = 0.0;
  // Set when the metric had nothing to compare (soft-TFIDF with no tokens).
  bool degenerate = false;
};

// Last column of the sorted circular rotations, no terminator appended.
// Rotations are compared by scalar value. A string holding exactly one '@'
// keeps it in front and transforms the rotation that follows it, so
// "@smithbobt" and "@bobtsmith" both give "@hotmsbtib".
std::u32string lossy_bw_transform(std::u32string_view input);
std::string lossy_bw_transform(std::string_view utf8);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// Optimal string alignment distance: adjacent transpositions count as one
// edit, but no substring is edited more than once.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b);

// 1 - 2d / (|a| + |b| + d); two empty strings compare as 1.
double normalized_edit_similarity(std::u32string_view a, std::u32string_view b, EditKind kind);

double jaro(std::u32string_view a, std::u32string_view b);

struct WinklerParams {
  double prefix_scale = 0.1;
  std::size_t max_prefix = 4;
};

double jaro_winkler(std::u32string_view a, std::u32string_view b, WinklerParams params = {});

// Document frequencies of whitespace tokens over a name corpus. Immutable
// once built and safe to share between threads.
class TokenStats {
 public:
  void add_document(std::string_view text);
  std::size_t documents() const { return documents_; }
  std::size_t document_frequency(std::string_view token) const;
  // ln((N + 1) / (df + 1)) + 1, always positive.
  double idf(std::string_view token) const;

 private:
  std::map<std::string, std::size_t, std::less<>> df_;
  std::size_t documents_ = 0;
};

std::vector<std::u32string> tokenize_whitespace(std::u32string_view text);

inline constexpr double kSoftTfidfThreshold = 0.9;

// Soft-TFIDF over whitespace tokens with Jaro-Winkler as the secondary
// similarity. Token weights are ln(tf + 1) * idf, L2-normalized per string.
// The directed sum is averaged over both directions so the score is
// symmetric; the result is clamped to [0, 1].
Similarity soft_tfidf(std::string_view a, std::string_view b, const TokenStats& stats,
                      double threshold = kSoftTfidfThreshold);

// Applies the pipeline stages in order (norm, lower, bw) and then the metric.
// `stats` is only consulted for soft-TFIDF; it must have been built from
// strings preprocessed with the same norm/lower stages.
Similarity profile_similarity(std::string_view a, std::string_view b, const PipelineSpec& spec,
                              Field field = Field::username, const TokenStats* stats = nullptr);

// The norm/lower stages of the pipeline.
std::string preprocess(std::string_view text, const PipelineSpec& spec, Field field);

}  // namespace crossres::strsim

#endif  // CROSSRES_STRSIM_H_
