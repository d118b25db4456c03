#ifndef CROSSRES_FUSION_H_
#define CROSSRES_FUSION_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crossres/eval.h"
#include "crossres/learners.h"

namespace crossres::fusion {

enum Column : uint8_t { kPUser = 0, kPFull, kContent, kComm1, kNbr1, kComm2, kNbr2 };
inline constexpr size_t kColumnCount = 7;
inline constexpr std::array<std::string_view, kColumnCount> kColumnNames = {"P_user", "P_full", "C",   "Comm1",
                                                                            "NBR1",   "Comm2",  "NBR2"};

// Bit i set when column i is present.
using Mask = uint8_t;
inline constexpr Mask kAllColumns = (1u << kColumnCount) - 1;

constexpr Mask bit(Column c) { return static_cast<Mask>(1u << c); }

// "P", "C", "N1", "N2" joined with '+'. P = both profile columns, N1 =
// Comm1 + NBR1, N2 = Comm2 + NBR2. Throws ConfigError on unknown names.
Mask parse_bundles(std::string_view spec);
std::string mask_to_string(Mask mask);  // column names joined with '+'

struct ScoreRow {
  std::string trial_id;
  bool label = false;
  bool nontrivial = true;
  int fold = -1;
  std::array<std::optional<double>, kColumnCount> scores;

  Mask present() const;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
};

using ScoreMap = std::map<std::string, double>;

// One row per trial, in trial order; columns absent from a map are missing.
// Throws DataError on duplicate trial ids or map keys naming unknown trials.
ScoreTable assemble_score_table(const std::vector<eval::Trial>& trials,
                                const std::array<const ScoreMap*, kColumnCount>& maps);

enum class ModelKind { logit, random_forest };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);  // throws ConfigError

struct MaskModel {
  Mask mask = 0;
  ModelKind kind = ModelKind::logit;
  learners::LinearModel linear;
  std::vector<double> mean;   // logistic input standardization
  std::vector<double> scale;
  learners::ForestModel forest;
  size_t training_count = 0;

  // Probability of the same-entity class from the columns in mask.
  double predict(const ScoreRow& row) const;
};

struct FusionParams {
  ModelKind kind = ModelKind::random_forest;
  Mask selection = kAllColumns;
  size_t min_mask_rows = 20;
  learners::LogisticParams logistic;
  learners::ForestParams forest;
};

struct FusionModelSet {
  Mask selection = kAllColumns;
  std::vector<MaskModel> models;  // ascending by mask

  // Exact model for the row's selected present columns, else the model with
  // the largest mask contained in them; nullptr when none applies.
  const MaskModel* model_for(Mask present) const;
};

// Trains one model per realized mask (present columns restricted to the
// selection) having at least min_mask_rows rows and both labels, plus a model
// for the intersection of all realized masks. Throws DataError when no model
// can be trained.
FusionModelSet train_fusion(std::span<const ScoreRow> rows, const FusionParams& params);

struct FusedScore {
  std::optional<double> score;
  std::optional<Mask> model_mask;  // mask of the model that produced the score
};

// Rows without an applicable model are left missing and a warning naming the
// trial is appended.
std::vector<FusedScore> score_fusion(std::span<const ScoreRow> rows, const FusionModelSet& models,
                                     std::vector<std::string>* warnings = nullptr);

// TSV with a column header; '#' lines are comments. NA marks missing values.
void write_score_table(std::ostream& out, const ScoreTable& table);
ScoreTable read_score_table(std::istream& in);

std::string format_score(double v);

}  // namespace crossres::fusion

#endif  // CROSSRES_FUSION_H_
