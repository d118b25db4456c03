#include "crossres/fusion.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "crossres/errors.h"

namespace crossres::fusion {

Mask parse_bundles(std::string_view spec) {
  Mask mask = 0;
  std::stringstream ss{std::string(spec)};
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "P") mask |= bit(kPUser) | bit(kPFull);
    else if (part == "C") mask |= bit(kContent);
    else if (part == "N1") mask |= bit(kComm1) | bit(kNbr1);
    else if (part == "N2") mask |= bit(kComm2) | bit(kNbr2);
    else throw ConfigError("unknown fusion bundle '" + part + "' in '" + std::string(spec) + "'");
  }
  if (mask == 0) throw ConfigError("empty fusion bundle selection");
  return mask;
}

std::string mask_to_string(Mask mask) {
  std::string out;
  for (size_t c = 0; c < kColumnCount; ++c) {
    if (!(mask & (1u << c))) continue;
    if (!out.empty()) out += '+';
    out += kColumnNames[c];
  }
  return out.empty() ? "none" : out;
}

Mask ScoreRow::present() const {
  Mask m = 0;
  for (size_t c = 0; c < kColumnCount; ++c)
    if (scores[c]) m |= static_cast<Mask>(1u << c);
  return m;
}

ScoreTable assemble_score_table(const std::vector<eval::Trial>& trials,
                                const std::array<const ScoreMap*, kColumnCount>& maps) {
  std::map<std::string, size_t> index;
  ScoreTable table;
  table.rows.reserve(trials.size());
  for (const auto& t : trials) {
    if (!index.emplace(t.id, table.rows.size()).second) throw DataError("duplicate trial id '" + t.id + "'");
    ScoreRow row;
    row.trial_id = t.id;
    row.label = t.label;
    row.nontrivial = t.nontrivial;
    row.fold = t.fold;
    table.rows.push_back(std::move(row));
  }
  for (size_t c = 0; c < kColumnCount; ++c) {
    if (!maps[c]) continue;
    for (const auto& [id, score] : *maps[c]) {
      auto it = index.find(id);
      if (it == index.end()) throw DataError("score for unknown trial '" + id + "'");
      table.rows[it->second].scores[c] = score;
    }
  }
  return table;
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::logit ? "logit" : "random_forest"; }

ModelKind parse_model_kind(std::string_view s) {
  if (s == "logit") return ModelKind::logit;
  if (s == "random_forest" || s == "randf") return ModelKind::random_forest;
  throw ConfigError("unknown fusion model kind '" + std::string(s) + "'");
}

namespace {

std::vector<size_t> columns_of(Mask mask) {
  std::vector<size_t> cols;
  for (size_t c = 0; c < kColumnCount; ++c)
    if (mask & (1u << c)) cols.push_back(c);
  return cols;
}

MaskModel fit(Mask mask, const std::vector<const ScoreRow*>& rows, const FusionParams& params) {
  const auto cols = columns_of(mask);
  learners::DenseMatrix x(rows.size(), cols.size());
  std::vector<int> y(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t k = 0; k < cols.size(); ++k) x.at(r, k) = *rows[r]->scores[cols[k]];
    y[r] = rows[r]->label ? 1 : 0;
  }
  MaskModel model;
  model.mask = mask;
  model.kind = params.kind;
  model.training_count = rows.size();
  if (params.kind == ModelKind::logit) {
    model.mean.assign(cols.size(), 0.0);
    model.scale.assign(cols.size(), 1.0);
    const double n = static_cast<double>(rows.size());
    for (size_t k = 0; k < cols.size(); ++k) {
      double sum = 0.0, sum2 = 0.0;
      for (size_t r = 0; r < rows.size(); ++r) sum += x.at(r, k);
      const double mean = sum / n;
      for (size_t r = 0; r < rows.size(); ++r) sum2 += (x.at(r, k) - mean) * (x.at(r, k) - mean);
      const double sd = std::sqrt(sum2 / n);
      model.mean[k] = mean;
      model.scale[k] = sd > 0 ? sd : 1.0;
      for (size_t r = 0; r < rows.size(); ++r) x.at(r, k) = (x.at(r, k) - mean) / model.scale[k];
    }
    model.linear = learners::train_logistic(x, y, params.logistic);
  } else {
    learners::ForestParams fp = params.forest;
    fp.seed = params.forest.seed * 131 + mask;
    model.forest = learners::train_random_forest(x, y, fp);
  }
  return model;
}

bool both_labels(const std::vector<const ScoreRow*>& rows) {
  bool pos = false, neg = false;
  for (const auto* r : rows) (r->label ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

double MaskModel::predict(const ScoreRow& row) const {
  const auto cols = columns_of(mask);
  std::vector<double> x(cols.size());
  for (size_t k = 0; k < cols.size(); ++k) {
    const auto& v = row.scores[cols[k]];
    if (!v) throw DataError("row " + row.trial_id + " lacks a column required by its fusion model");
    x[k] = *v;
  }
  if (kind == ModelKind::logit) {
    for (size_t k = 0; k < x.size(); ++k) x[k] = (x[k] - mean[k]) / scale[k];
    return linear.probability(x);
  }
  return forest.predict(x);
}

const MaskModel* FusionModelSet::model_for(Mask present) const {
  const Mask m = present & selection;
  const MaskModel* best = nullptr;
  for (const auto& model : models) {
    if ((model.mask & ~m) != 0) continue;
    if (model.mask == m) return &model;
    if (!best || std::popcount(model.mask) > std::popcount(best->mask) ||
        (std::popcount(model.mask) == std::popcount(best->mask) && model.training_count > best->training_count))
      best = &model;
  }
  return best;
}

FusionModelSet train_fusion(std::span<const ScoreRow> rows, const FusionParams& params) {
  std::map<Mask, std::vector<const ScoreRow*>> groups;
  for (const auto& row : rows) {
    const Mask m = row.present() & params.selection;
    if (m != 0) groups[m].push_back(&row);
  }
  if (groups.empty()) throw DataError("fusion training table has no rows with selected features");

  FusionModelSet set;
  set.selection = params.selection;
  Mask intersection = params.selection;
  for (const auto& [mask, members] : groups) {
    intersection &= mask;
    if (members.size() >= params.min_mask_rows && both_labels(members)) set.models.push_back(fit(mask, members, params));
  }
  const bool have_intersection =
      std::any_of(set.models.begin(), set.models.end(), [&](const MaskModel& m) { return m.mask == intersection; });
  if (intersection != 0 && !have_intersection) {
    std::vector<const ScoreRow*> members;
    for (const auto& [mask, group] : groups)
      if ((mask & intersection) == intersection) members.insert(members.end(), group.begin(), group.end());
    if (members.size() >= 2 && both_labels(members)) set.models.push_back(fit(intersection, members, params));
  }
  if (set.models.empty()) throw DataError("no fusion model could be trained: too few rows per feature mask");
  std::sort(set.models.begin(), set.models.end(), [](const MaskModel& a, const MaskModel& b) { return a.mask < b.mask; });
  return set;
}

std::vector<FusedScore> score_fusion(std::span<const ScoreRow> rows, const FusionModelSet& models,
                                     std::vector<std::string>* warnings) {
  std::vector<FusedScore> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const MaskModel* model = models.model_for(rows[i].present());
    if (!model) {
      if (warnings)
        warnings->push_back("trial " + rows[i].trial_id + ": no fusion model for present features " +
                            mask_to_string(rows[i].present() & models.selection));
      continue;
    }
    out[i] = {model->predict(rows[i]), model->mask};
  }
  return out;
}

std::string format_score(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_score_table(std::ostream& out, const ScoreTable& table) {
  out << "trial_id\tlabel\tnontrivial\tfold";
  for (auto name : kColumnNames) out << '\t' << name;
  out << '\n';
  for (const auto& r : table.rows) {
    out << r.trial_id << '\t' << (r.label ? 1 : 0) << '\t' << (r.nontrivial ? 1 : 0) << '\t' << r.fold;
    for (const auto& s : r.scores) out << '\t' << (s ? format_score(*s) : "NA");
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

ScoreTable read_score_table(std::istream& in) {
  ScoreTable table;
  std::string line;
  bool header = false;
  size_t line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_tabs(line);
    if (!header) {
      if (f.size() != 4 + kColumnCount || f[0] != "trial_id")
        throw DataError("score table header not recognized at line " + std::to_string(line_no));
      for (size_t c = 0; c < kColumnCount; ++c)
        if (f[4 + c] != kColumnNames[c]) throw DataError("unexpected score column '" + f[4 + c] + "'");
      header = true;
      continue;
    }
    if (f.size() != 4 + kColumnCount) throw DataError("score table line " + std::to_string(line_no) + " is malformed");
    ScoreRow row;
    row.trial_id = f[0];
    if (!ids.insert(row.trial_id).second) throw DataError("duplicate trial id '" + row.trial_id + "'");
    try {
      row.label = std::stoi(f[1]) != 0;
      row.nontrivial = std::stoi(f[2]) != 0;
      row.fold = std::stoi(f[3]);
      for (size_t c = 0; c < kColumnCount; ++c)
        if (f[4 + c] != "NA") row.scores[c] = std::stod(f[4 + c]);
    } catch (const std::logic_error&) {
      throw DataError("score table line " + std::to_string(line_no) + " has a bad number");
    }
    table.rows.push_back(std::move(row));
  }
  if (!header) throw DataError("score table is empty");
  return table;
}

}  // namespace crossres::fusion
