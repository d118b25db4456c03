#include "crossres/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crossres/errors.h"
#include "crossres/random.h"

namespace crossres::learners {
namespace {

void require_two_classes(std::span<const int> y, int negative, int positive) {
  bool has_neg = false, has_pos = false;
  for (int label : y) {
    if (label == negative) has_neg = true;
    else if (label == positive) has_pos = true;
    else throw DataError("invalid label " + std::to_string(label));
  }
  if (!has_neg || !has_pos) throw DataError("degenerate labels: both classes are required");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw DataError("row width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double LinearModel::decision(const SparseVector& x) const {
  double s = bias;
  for (const auto& e : x)
    if (e.index < weights.size()) s += weights[e.index] * e.value;
  return s;
}

double LinearModel::decision(std::span<const double> x) const {
  double s = bias;
  const size_t n = std::min(x.size(), weights.size());
  for (size_t i = 0; i < n; ++i) s += weights[i] * x[i];
  return s;
}

double LinearModel::probability(std::span<const double> x) const { return sigmoid(decision(x)); }

LinearModel train_linear_svm(const std::vector<SparseVector>& x, std::span<const int> y, size_t dim,
                             const SvmParams& params) {
  if (x.size() != y.size()) throw DataError("feature/label count mismatch");
  if (params.c <= 0) throw ConfigError("SVM C must be positive");
  require_two_classes(y, -1, 1);
  for (const auto& row : x)
    if (!row.empty() && row.back().index >= dim) throw DataError("feature index exceeds dimension");

  const size_t n = x.size();
  LinearModel model;
  model.weights.assign(dim, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag(n);
  for (size_t i = 0; i < n; ++i) diag[i] = squared_norm(x[i]) + 1.0;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(params.seed);

  for (size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    rng.shuffle(std::span<size_t>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (size_t i : order) {
      const double yi = y[i];
      const double g = yi * model.decision(x[i]) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] == params.c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) <= 1e-12) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / diag[i], 0.0, params.c);
      const double delta = (alpha[i] - old) * yi;
      for (const auto& e : x[i]) model.weights[e.index] += delta * e.value;
      model.bias += delta;
    }
    if (pg_max - pg_min < params.tolerance) break;
  }
  return model;
}

double svm_objective(const LinearModel& model, const std::vector<SparseVector>& x, std::span<const int> y,
                     double c) {
  double reg = model.bias * model.bias;
  for (double w : model.weights) reg += w * w;
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) loss += std::max(0.0, 1.0 - y[i] * model.decision(x[i]));
  return 0.5 * reg + c * loss;
}

namespace {

struct LogisticObjective {
  const DenseMatrix& x;
  std::span<const int> y;
  double l2;

  // Value at (w, b); fills grad (size cols + 1, bias last).
  double evaluate(const std::vector<double>& params, std::vector<double>& grad) const {
    const size_t d = x.cols();
    const double n = static_cast<double>(x.rows());
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (size_t r = 0; r < x.rows(); ++r) {
      const auto row = x.row(r);
      double z = params[d];
      for (size_t c = 0; c < d; ++c) z += params[c] * row[c];
      loss += softplus(z) - (y[r] == 1 ? z : 0.0);
      const double residual = sigmoid(z) - y[r];
      for (size_t c = 0; c < d; ++c) grad[c] += residual * row[c];
      grad[d] += residual;
    }
    loss /= n;
    for (double& g : grad) g /= n;
    double reg = 0.0;
    for (size_t c = 0; c < d; ++c) {
      reg += params[c] * params[c];
      grad[c] += l2 * params[c];
    }
    return loss + 0.5 * l2 * reg;
  }
};

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace

LinearModel train_logistic(const DenseMatrix& x, std::span<const int> y, const LogisticParams& params) {
  if (x.rows() != y.size()) throw DataError("feature/label count mismatch");
  if (params.l2 < 0) throw ConfigError("l2 must be non-negative");
  require_two_classes(y, 0, 1);

  const size_t d = x.cols();
  LogisticObjective objective{x, y, params.l2};
  std::vector<double> w(d + 1, 0.0), grad(d + 1), next(d + 1), next_grad(d + 1);
  double value = objective.evaluate(w, grad);
  double step = 1.0;

  for (size_t it = 0; it < params.max_iterations && inf_norm(grad) > params.tolerance; ++it) {
    const double g2 = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    double next_value = 0.0;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (size_t k = 0; k <= d; ++k) next[k] = w[k] - step * grad[k];
      next_value = objective.evaluate(next, next_grad);
      if (next_value <= value - 1e-4 * step * g2) break;
      step *= 0.5;
    }
    // Barzilai-Borwein step for the next iteration.
    double ss = 0.0, sy = 0.0;
    for (size_t k = 0; k <= d; ++k) {
      const double s = next[k] - w[k];
      const double yk = next_grad[k] - grad[k];
      ss += s * s;
      sy += s * yk;
    }
    if (ss == 0.0) break;
    step = sy > 0 ? std::clamp(ss / sy, 1e-8, 1e8) : 1.0;
    w.swap(next);
    grad.swap(next_grad);
    value = next_value;
  }

  LinearModel model;
  model.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  model.bias = w[d];
  return model;
}

double DecisionTree::predict(std::span<const double> x) const {
  if (nodes.empty()) return 0.5;
  int i = 0;
  while (nodes[static_cast<size_t>(i)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<size_t>(i)];
    i = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<size_t>(i)].probability;
}

double ForestModel::predict(std::span<const double> x) const {
  if (trees.empty()) return 0.5;
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const DenseMatrix& x, std::span<const int> y, const ForestParams& params, Rng rng)
      : x_(x), y_(y), params_(params), rng_(rng) {
    mtry_ = params.max_features > 0
                ? std::min(params.max_features, x.cols())
                : static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
    mtry_ = std::max<size_t>(mtry_, 1);
  }

  DecisionTree build(std::vector<size_t> sample) {
    DecisionTree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  int grow(DecisionTree& tree, std::vector<size_t>& sample, size_t depth) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    size_t positives = 0;
    for (size_t i : sample) positives += static_cast<size_t>(y_[i]);
    const double n = static_cast<double>(sample.size());
    tree.nodes.back().probability = sample.empty() ? 0.5 : static_cast<double>(positives) / n;

    if (depth >= params_.max_depth || sample.size() < params_.min_samples_split || positives == 0 ||
        positives == sample.size())
      return index;

    const double p = static_cast<double>(positives) / n;
    const double parent = 2.0 * p * (1.0 - p) * n;
    const Split split = best_split(sample);
    if (split.feature < 0 || split.impurity >= parent - 1e-12) return index;

    std::vector<size_t> left, right;
    for (size_t i : sample)
      (x_.at(i, static_cast<size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();
    tree.nodes[static_cast<size_t>(index)].feature = split.feature;
    tree.nodes[static_cast<size_t>(index)].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    tree.nodes[static_cast<size_t>(index)].left = l;
    const int r = grow(tree, right, depth + 1);
    tree.nodes[static_cast<size_t>(index)].right = r;
    return index;
  }

  // Weighted Gini impurity (count * gini) of the best threshold over up to
  // mtry non-constant features, visited in random order.
  Split best_split(const std::vector<size_t>& sample) {
    std::vector<size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), size_t{0});
    rng_.shuffle(std::span<size_t>(features));
    Split best;
    size_t evaluated = 0;
    std::vector<std::pair<double, int>> column(sample.size());
    for (size_t f : features) {
      if (evaluated == mtry_) break;
      for (size_t k = 0; k < sample.size(); ++k) column[k] = {x_.at(sample[k], f), y_[sample[k]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++evaluated;
      const double total = static_cast<double>(column.size());
      double total_pos = 0.0;
      for (const auto& c : column) total_pos += c.second;
      double left_pos = 0.0;
      for (size_t k = 0; k + 1 < column.size(); ++k) {
        left_pos += column[k].second;
        if (column[k].first == column[k + 1].first) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = total - nl;
        const double pl = left_pos / nl;
        const double pr = (total_pos - left_pos) / nr;
        const double impurity = 2.0 * pl * (1.0 - pl) * nl + 2.0 * pr * (1.0 - pr) * nr;
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (column[k].first + column[k + 1].first);
          // Midpoint can round onto the upper value for adjacent doubles.
          if (best.threshold >= column[k + 1].first) best.threshold = column[k].first;
        }
      }
    }
    return best;
  }

  const DenseMatrix& x_;
  std::span<const int> y_;
  const ForestParams& params_;
  Rng rng_;
  size_t mtry_ = 1;
};

}  // namespace

ForestModel train_random_forest(const DenseMatrix& x, std::span<const int> y, const ForestParams& params) {
  if (x.rows() != y.size()) throw DataError("feature/label count mismatch");
  if (x.rows() < 2) throw DataError("random forest needs at least two examples");
  if (params.trees == 0) throw ConfigError("tree count must be positive");
  require_two_classes(y, 0, 1);

  ForestModel forest;
  forest.trees.reserve(params.trees);
  Rng master(params.seed);
  for (size_t t = 0; t < params.trees; ++t) {
    Rng rng = master.fork(t);
    std::vector<size_t> sample(x.rows());
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<size_t>(rng.below(x.rows()));
    } else {
      std::iota(sample.begin(), sample.end(), size_t{0});
    }
    TreeBuilder builder(x, y, params, rng.fork(t + 1));
    forest.trees.push_back(builder.build(std::move(sample)));
  }
  return forest;
}

bool finite_check(const LinearModel& model) {
  if (!std::isfinite(model.bias)) return false;
  return std::all_of(model.weights.begin(), model.weights.end(), [](double w) { return std::isfinite(w); });
}

bool finite_check(const ForestModel& model) {
  for (const auto& tree : model.trees)
    for (const auto& node : tree.nodes)
      if (!std::isfinite(node.threshold) || !std::isfinite(node.probability)) return false;
  return true;
}

nlohmann::json to_json(const LinearModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (size_t i = 0; i < model.weights.size(); ++i)
    if (model.weights[i] != 0.0) weights.push_back({i, model.weights[i]});
  return {{"version", kModelFormatVersion},
          {"type", "linear"},
          {"dim", model.weights.size()},
          {"bias", model.bias},
          {"weights", std::move(weights)}};
}

nlohmann::json to_json(const ForestModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.probability});
    trees.push_back(std::move(nodes));
  }
  return {{"version", kModelFormatVersion}, {"type", "forest"}, {"trees", std::move(trees)}};
}

namespace {

void check_header(const nlohmann::json& j, const char* type) {
  if (!j.is_object() || j.value("version", 0) != kModelFormatVersion || j.value("type", "") != type)
    throw DataError(std::string("not a version ") + std::to_string(kModelFormatVersion) + " " + type +
                    " model record");
}

}  // namespace

LinearModel linear_from_json(const nlohmann::json& j) {
  check_header(j, "linear");
  LinearModel model;
  model.weights.assign(j.at("dim").get<size_t>(), 0.0);
  model.bias = j.at("bias").get<double>();
  for (const auto& pair : j.at("weights")) {
    const auto index = pair.at(0).get<size_t>();
    if (index >= model.weights.size()) throw DataError("weight index out of range");
    model.weights[index] = pair.at(1).get<double>();
  }
  return model;
}

ForestModel forest_from_json(const nlohmann::json& j) {
  check_header(j, "forest");
  ForestModel model;
  for (const auto& nodes : j.at("trees")) {
    DecisionTree tree;
    for (const auto& n : nodes)
      tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                            n.at(4).get<double>()});
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace crossres::learners
