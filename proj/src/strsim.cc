#include "crossres/strsim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "crossres/errors.h"
#include "crossres/normalize.h"
#include "crossres/unicode.h"

namespace crossres::strsim {

PipelineSpec PipelineSpec::parse(std::string_view id) {
  PipelineSpec spec;
  bool have_metric = false;
  std::string text(id);
  std::stringstream ss(text);
  std::string tok;
  std::vector<std::string> tokens;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    tokens.push_back(tok);
  }
  for (const auto& t : tokens) {
    if (t == "soft-tfidf") {
      spec.metric = Metric::soft_tfidf;
      spec.norm = true;
      spec.lower = true;
      spec.bw = false;
      have_metric = true;
      break;
    }
  }
  auto set_metric = [&](Metric m) {
    if (have_metric) throw ConfigError("profile system '" + text + "' names more than one metric");
    spec.metric = m;
    have_metric = true;
  };
  for (const auto& t : tokens) {
    if (t == "soft-tfidf") continue;
    if (t == "jaro") set_metric(Metric::jaro);
    else if (t == "jw") set_metric(Metric::jaro_winkler);
    else if (t == "nl") set_metric(Metric::norm_levenshtein);
    else if (t == "ndl") set_metric(Metric::norm_damerau_levenshtein);
    else if (t == "norm") spec.norm = true;
    else if (t == "nonorm") spec.norm = false;
    else if (t == "lower") spec.lower = true;
    else if (t == "nolower") spec.lower = false;
    else if (t == "bw") spec.bw = true;
    else if (t == "nobw") spec.bw = false;
    else throw ConfigError("unknown profile system token '" + t + "' in '" + text + "'");
  }
  if (!have_metric) throw ConfigError("profile system '" + text + "' names no metric");
  spec.validate();
  return spec;
}

void PipelineSpec::validate() const {
  if (metric == Metric::soft_tfidf && bw)
    throw ConfigError("soft-tfidf is token based and cannot follow the bw stage");
}

std::string PipelineSpec::to_string() const {
  std::string metric_name;
  switch (metric) {
    case Metric::jaro: metric_name = "jaro"; break;
    case Metric::jaro_winkler: metric_name = "jw"; break;
    case Metric::norm_levenshtein: metric_name = "nl"; break;
    case Metric::norm_damerau_levenshtein: metric_name = "ndl"; break;
    case Metric::soft_tfidf: metric_name = "soft-tfidf"; break;
  }
  return metric_name + (norm ? ",norm" : ",nonorm") + (lower ? ",lower" : ",nolower") +
         (bw ? ",bw" : ",nobw");
}

namespace {

std::u32string sorted_rotation_tails(std::u32string_view input) {
  const size_t n = input.size();
  if (n == 0) return {};
  std::vector<size_t> rotations(n);
  std::iota(rotations.begin(), rotations.end(), size_t{0});
  std::sort(rotations.begin(), rotations.end(), [&](size_t x, size_t y) {
    for (size_t k = 0; k < n; ++k) {
      const char32_t cx = input[(x + k) % n];
      const char32_t cy = input[(y + k) % n];
      if (cx != cy) return cx < cy;
    }
    return false;
  });
  std::u32string out(n, U'\0');
  for (size_t r = 0; r < n; ++r) out[r] = input[(rotations[r] + n - 1) % n];
  return out;
}

}  // namespace

std::u32string lossy_bw_transform(std::u32string_view input) {
  // A lone '@' is the handle sigil: it anchors the rotation and stays in
  // front, and the name after it is transformed.
  if (std::count(input.begin(), input.end(), U'@') == 1) {
    const size_t at = input.find(U'@');
    std::u32string body(input.substr(at + 1));
    body += input.substr(0, at);
    return U"@" + sorted_rotation_tails(body);
  }
  return sorted_rotation_tails(input);
}

std::string lossy_bw_transform(std::string_view utf8) {
  return unicode::encode_utf8(lossy_bw_transform(unicode::decode_utf8(utf8)));
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const size_t m = b.size();
  std::vector<size_t> before(m + 1), prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        best = std::min(best, before[j - 2] + 1);
      cur[j] = best;
    }
    std::swap(before, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

double normalized_edit_similarity(std::u32string_view a, std::u32string_view b, EditKind kind) {
  if (a.empty() && b.empty()) return 1.0;
  const double d = static_cast<double>(kind == EditKind::lev ? levenshtein(a, b)
                                                             : damerau_levenshtein(a, b));
  const double total = static_cast<double>(a.size() + b.size());
  return 1.0 - 2.0 * d / (total + d);
}

double jaro(std::u32string_view a, std::u32string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const size_t window = std::max(a.size(), b.size()) / 2;
  const size_t reach = window > 0 ? window - 1 : 0;
  std::vector<char> a_matched(a.size(), 0), b_matched(b.size(), 0);
  size_t matches = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const size_t lo = i > reach ? i - reach : 0;
    const size_t hi = std::min(b.size(), i + reach + 1);
    for (size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || a[i] != b[j]) continue;
      a_matched[i] = b_matched[j] = 1;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  size_t out_of_order = 0;
  for (size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++out_of_order;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(out_of_order) / 2.0;
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

double jaro_winkler(std::u32string_view a, std::u32string_view b, WinklerParams params) {
  const double j = jaro(a, b);
  const size_t limit = std::min({a.size(), b.size(), params.max_prefix});
  size_t prefix = 0;
  while (prefix < limit && a[prefix] == b[prefix]) ++prefix;
  return std::min(1.0, j + static_cast<double>(prefix) * params.prefix_scale * (1.0 - j));
}

std::vector<std::u32string> tokenize_whitespace(std::u32string_view text) {
  std::vector<std::u32string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && unicode::is_whitespace(text[i])) ++i;
    size_t j = i;
    while (j < text.size() && !unicode::is_whitespace(text[j])) ++j;
    if (j > i) tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

void TokenStats::add_document(std::string_view text) {
  auto tokens = tokenize_whitespace(unicode::decode_utf8(text));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  for (const auto& t : tokens) ++df_[unicode::encode_utf8(t)];
  ++documents_;
}

std::size_t TokenStats::document_frequency(std::string_view token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double TokenStats::idf(std::string_view token) const {
  const double n = static_cast<double>(documents_);
  const double df = static_cast<double>(document_frequency(token));
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

namespace {

struct WeightedTokens {
  std::vector<std::u32string> tokens;  // unique, sorted
  std::vector<double> weights;         // unnormalized ln(tf + 1) * idf
  double norm2 = 0.0;
};

WeightedTokens weigh(std::string_view text, const TokenStats& stats) {
  auto all = tokenize_whitespace(unicode::decode_utf8(text));
  std::sort(all.begin(), all.end());
  WeightedTokens out;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double w = std::log(static_cast<double>(j - i) + 1.0) * stats.idf(unicode::encode_utf8(all[i]));
    out.tokens.push_back(all[i]);
    out.weights.push_back(w);
    out.norm2 += w * w;
    i = j;
  }
  return out;
}

double directed_soft_tfidf(const WeightedTokens& a, const WeightedTokens& b, double threshold) {
  double sum = 0.0;
  for (size_t i = 0; i < a.tokens.size(); ++i) {
    double best = -1.0;
    size_t best_j = 0;
    for (size_t j = 0; j < b.tokens.size(); ++j) {
      const double s = jaro_winkler(a.tokens[i], b.tokens[j]);
      if (s > best) best = s, best_j = j;
    }
    if (best >= threshold) sum += a.weights[i] * b.weights[best_j] * best;
  }
  // sqrt(x * x) == x in IEEE arithmetic, so identical inputs give exactly 1.
  return sum / std::sqrt(a.norm2 * b.norm2);
}

}  // namespace

Similarity soft_tfidf(std::string_view a, std::string_view b, const TokenStats& stats, double threshold) {
  const WeightedTokens wa = weigh(a, stats);
  const WeightedTokens wb = weigh(b, stats);
  if (wa.tokens.empty() || wb.tokens.empty()) return {0.0, true};
  const double s = 0.5 * (directed_soft_tfidf(wa, wb, threshold) + directed_soft_tfidf(wb, wa, threshold));
  return {std::clamp(s, 0.0, 1.0), false};
}

std::string preprocess(std::string_view text, const PipelineSpec& spec, Field field) {
  normalize::NormalizationConfig config;
  config.apply_norm = spec.norm;
  config.apply_lowercase = spec.lower;
  config.reorder_full_name = spec.norm && field == Field::full_name;
  return normalize::normalize_text(text, config);
}

Similarity profile_similarity(std::string_view a, std::string_view b, const PipelineSpec& spec,
                              Field field, const TokenStats* stats) {
  spec.validate();
  const std::string pa = preprocess(a, spec, field);
  const std::string pb = preprocess(b, spec, field);
  if (spec.metric == Metric::soft_tfidf) {
    static const TokenStats kEmpty;
    return soft_tfidf(pa, pb, stats ? *stats : kEmpty);
  }
  std::u32string ua = unicode::decode_utf8(pa);
  std::u32string ub = unicode::decode_utf8(pb);
  if (spec.bw) {
    ua = lossy_bw_transform(ua);
    ub = lossy_bw_transform(ub);
  }
  switch (spec.metric) {
    case Metric::jaro: return {jaro(ua, ub)};
    case Metric::jaro_winkler: return {jaro_winkler(ua, ub)};
    case Metric::norm_levenshtein: return {normalized_edit_similarity(ua, ub, EditKind::lev)};
    case Metric::norm_damerau_levenshtein: return {normalized_edit_similarity(ua, ub, EditKind::dl)};
    case Metric::soft_tfidf: break;
  }
  return {};
}

}  // namespace crossres::strsim
