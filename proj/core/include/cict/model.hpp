#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cict/features.hpp"
#include "cict/labels.hpp"

namespace cict {

/// Feature rows with one label each.
struct LabeledEdgeSet {
  FeatureMatrix rows;
  std::vector<EdgeLabel> labels;
};

/// Rows restricted to two label groups; y = 1 for `positive`, 0 for `negative`.
struct BinaryView {
  FeatureMatrix x;
  std::vector<int> y;
  std::vector<std::size_t> source_rows;  // indices into the originating set
};

BinaryView binary_view(const LabeledEdgeSet& set, const std::vector<EdgeLabel>& positive,
                       const std::vector<EdgeLabel>& negative);

struct TrainConfig {
  std::size_t n_trees = 3;
  std::size_t max_depth = 5;
  std::size_t k_folds = 10;
  std::size_t repeats = 50;
  std::uint64_t rng_seed = 0;
  std::size_t features_per_split = 0;  // 0 = floor(sqrt(features))
  std::size_t min_leaf = 1;
  unsigned threads = 1;

  /// 3 trees of depth 5.
  static TrainConfig experiment_one();
  /// 30 trees of depth 5.
  static TrainConfig experiment_two();
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t samples = 0;
  double impurity_decrease = 0.0;  // count-weighted Gini decrease of this split
  std::vector<double> class_probs;  // leaves only

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<std::size_t> oob_rows;

  std::size_t depth() const;
  const std::vector<double>& leaf_probs(std::span<const double> row) const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::vector<std::string> feature_names;
  std::uint64_t schema_hash = 0;
  std::size_t n_classes = 2;
  TrainConfig config;

  std::string to_json() const;
  static RandomForest from_json(std::string_view text);
};

struct OobReport {
  std::vector<double> probability;  // NaN for rows never out of bag
  std::size_t covered = 0;
  double error = 0.0;  // misclassification at 0.5 over covered rows
};

struct TrainResult {
  RandomForest forest;
  OobReport oob;
};

/// Bagged Gini trees. y holds class ids 0..k-1 with at least two present.
TrainResult train_forest(const FeatureMatrix& x, std::span<const int> y, const TrainConfig& cfg);

/// Mean over trees of the leaf probability of class 1.
double predict(const RandomForest& forest, std::span<const double> row);
std::vector<double> predict_proba(const RandomForest& forest, std::span<const double> row);
/// Scores every row; the matrix schema must match the forest's.
std::vector<double> predict(const RandomForest& forest, const FeatureMatrix& x, unsigned threads = 1);

struct Importance {
  std::string feature;
  std::size_t index = 0;
  double value = 0.0;  // scaled so the maximum is 1
};

/// Total Gini decrease per feature across trees, descending (ties by index).
std::vector<Importance> variable_importance(const RandomForest& forest);

// ---------------------------------------------------------------------------
// Logistic regression baseline

struct LogisticConfig {
  double l2 = 1e-2;
  std::size_t max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

/// Mean log-loss plus (l2/2)|w|^2 on standardized features; the intercept is
/// not penalized. Parameters are laid out as [intercept, w...].
class LogisticProblem {
 public:
  LogisticProblem(const Matrix& standardized, std::span<const int> y, double l2);

  std::size_t dimension() const noexcept { return cols_ + 1; }
  double objective(std::span<const double> params) const;
  std::vector<double> gradient(std::span<const double> params) const;

  const Matrix& design() const noexcept { return x_; }
  std::span<const int> labels() const noexcept { return y_; }
  double l2() const noexcept { return l2_; }

 private:
  Matrix x_;
  std::vector<int> y_;
  double l2_;
  std::size_t cols_;
};

struct LogisticModel {
  std::vector<std::string> feature_names;
  std::uint64_t schema_hash = 0;
  std::vector<std::size_t> kept_columns;
  std::vector<double> means, scales;  // per kept column
  double intercept = 0.0;
  std::vector<double> weights;  // per kept column, standardized space
  std::size_t iterations = 0;
  double gradient_norm = 0.0;

  std::vector<double> params() const;  // [intercept, weights...]
};

/// Newton iterations with backtracking until |grad| < tolerance.
/// Throws Error{Convergence} with the final gradient norm otherwise.
LogisticModel train_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticConfig& cfg = {});
double predict(const LogisticModel& model, std::span<const double> row);
std::vector<double> predict(const LogisticModel& model, const FeatureMatrix& x);

// ---------------------------------------------------------------------------
// Cross-validation

/// Stratified fold ids in [0, k). With `groups`, rows sharing a group id stay
/// in one fold (groups are stratified by their label composition).
std::vector<int> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed,
                                  std::span<const int> groups = {});

struct RepeatMetrics {
  double auc = 0, mse = 0, r2 = 0;
};

struct MetricSummary {
  double mean = 0, sd = 0;
};

struct CvReport {
  std::vector<RepeatMetrics> repeats;  // pooled out-of-fold predictions per repeat
  MetricSummary auc, mse, r2;
  std::vector<double> oob_auc;  // OOB AUC of a full-data forest per repeat
  MetricSummary oob_auc_summary;
};

/// cfg.repeats rounds of k-fold CV with seeds derived from cfg.rng_seed.
CvReport cross_validate(const FeatureMatrix& x, std::span<const int> y, const TrainConfig& cfg,
                        std::span<const int> groups = {});

MetricSummary summarize_metric(std::span<const double> values);

}  // namespace cict
