#ifndef CROSSRES_LEARNERS_H_
#define CROSSRES_LEARNERS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "crossres/sparse.h"
#include "json.hpp"

namespace crossres::learners {

// Row-major dense feature matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  std::span<const double> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  double& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  void append_row(std::span<const double> values);

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(const SparseVector& x) const;
  double decision(std::span<const double> x) const;
  // Logistic link of the decision value.
  double probability(std::span<const double> x) const;
};

struct SvmParams {
  double c = 1.0;
  size_t max_epochs = 1000;
  double tolerance = 1e-6;
  uint64_t seed = 1;
};

// L1-loss (hinge) linear SVM trained by dual coordinate descent. The bias is
// learned as the weight of a constant feature equal to 1, so it shares the
// L2 penalty. Labels must be -1 or +1 with both present.
LinearModel train_linear_svm(const std::vector<SparseVector>& x, std::span<const int> y, size_t dim,
                             const SvmParams& params = {});

// (1/2)(|w|^2 + b^2) + C * sum of hinge losses, the quantity the solver minimizes.
double svm_objective(const LinearModel& model, const std::vector<SparseVector>& x,
                     std::span<const int> y, double c);

struct LogisticParams {
  double l2 = 1e-3;
  size_t max_iterations = 5000;
  double tolerance = 1e-6;
};

// Minimizes mean negative log-likelihood + (l2 / 2) |w|^2 (bias unpenalized)
// by gradient descent with Barzilai-Borwein steps and Armijo backtracking.
// Labels must be 0 or 1 with both present.
LinearModel train_logistic(const DenseMatrix& x, std::span<const int> y, const LogisticParams& params = {});

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;
  double probability = 0.0;  // positive-class fraction at this node
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> x) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  // Mean of the trees' leaf probabilities; 0.5 for an empty forest.
  double predict(std::span<const double> x) const;
};

struct ForestParams {
  size_t trees = 100;
  size_t max_depth = 8;
  uint64_t seed = 1;
  bool bootstrap = true;
  size_t max_features = 0;  // 0 selects ceil(sqrt(cols))
  size_t min_samples_split = 2;
};

// Gini-impurity CART trees on bootstrap samples with per-split feature
// subsampling. Labels must be 0 or 1 with both present.
ForestModel train_random_forest(const DenseMatrix& x, std::span<const int> y, const ForestParams& params = {});

bool finite_check(const LinearModel& model);
bool finite_check(const ForestModel& model);

// Versioned JSON encodings. Doubles round-trip exactly.
nlohmann::json to_json(const LinearModel& model);
nlohmann::json to_json(const ForestModel& model);
LinearModel linear_from_json(const nlohmann::json& j);
ForestModel forest_from_json(const nlohmann::json& j);

inline constexpr int kModelFormatVersion = 1;

}  // namespace crossres::learners

#endif  // CROSSRES_LEARNERS_H_
