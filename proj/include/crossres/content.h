#ifndef CROSSRES_CONTENT_H_
#define CROSSRES_CONTENT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossres/corpus.h"
#include "crossres/learners.h"
#include "crossres/sparse.h"

namespace crossres::content {

inline constexpr int64_t kDefaultMinWords = 200;

struct UserCountVector {
  std::string user_id;
  std::map<std::string, int64_t> counts;
  int64_t total_words = 0;

  bool no_content() const { return total_words == 0; }
};

// Normalized tokens of one post: links dropped, hashtags kept with '#',
// everything else passed through norm + lowercase and split on spaces.
std::vector<std::string> tokenize_text(std::string_view text);

// Word counts per posting user. All posts must come from one domain.
std::map<std::string, UserCountVector> tokenize_posts(const std::vector<Post>& posts);

// Dictionary of the model-training domain with per-word totals.
class Vocabulary {
 public:
  // Throws DataError when the users contribute no tokens at all.
  static Vocabulary build(const std::map<std::string, UserCountVector>& users);

  std::optional<uint32_t> index(std::string_view word) const;
  const std::string& word(uint32_t index) const { return words_[index]; }
  size_t size() const { return words_.size(); }
  int64_t global_count(uint32_t index) const { return global_counts_[index]; }
  int64_t total_tokens() const { return total_tokens_; }

 private:
  std::vector<std::string> words_;
  std::vector<int64_t> global_counts_;
  std::map<std::string, uint32_t, std::less<>> lookup_;
  int64_t total_tokens_ = 0;
};

enum class Weighting {
  // p(w|U) = count(w|U) / sum over users V of count(w|V)
  user_share,
  // p(w|U) = count(w|U) / total words of U
  user_distribution,
};

struct ContentVector {
  std::string user_id;
  SparseVector v;  // L2-normalized, empty when the user has no content
  int64_t total_words = 0;

  bool no_content() const { return v.empty(); }
};

// v_i = c_i * p(w_i|U) with c_i = ln(1 / p(w_i|all)) + 1, then L2-normalized.
// Words outside the vocabulary contribute nothing.
ContentVector build_content_vector(const UserCountVector& user, const Vocabulary& vocab,
                                   Weighting weighting = Weighting::user_share);

// The same weights before length normalization.
std::map<uint32_t, double> raw_weights(const UserCountVector& user, const Vocabulary& vocab,
                                       Weighting weighting = Weighting::user_share);

struct AuthorModel {
  std::string user_id;
  learners::LinearModel model;
};

using AuthorModels = std::map<std::string, AuthorModel>;

// One-vs-rest linear SVM per user with at least min_words words; the other
// eligible users are the negatives. Throws DataError("insufficient authors")
// when fewer than two users are eligible.
AuthorModels train_author_models(const std::vector<ContentVector>& vectors, size_t dim,
                                 int64_t min_words = kDefaultMinWords, const learners::SvmParams& params = {});

// Decision value of the Twitter user's model on the Instagram user's vector;
// nullopt when the model or a non-empty vector is absent.
std::optional<double> score_content(const std::string& twitter_user, const std::string& instagram_user,
                                    const AuthorModels& models,
                                    const std::map<std::string, ContentVector>& instagram_vectors);

// JSON Lines, one {"version","user_id","model"} record per author.
void write_model_store(std::ostream& out, const AuthorModels& models);
AuthorModels read_model_store(std::istream& in);

}  // namespace crossres::content

#endif  // CROSSRES_CONTENT_H_
