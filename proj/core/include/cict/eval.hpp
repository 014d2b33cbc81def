#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cict/matrix.hpp"

namespace cict::eval {

struct RocPoint {
  double threshold = 0;  // classify positive when score >= threshold
  double fpr = 0;
  double tpr = 0;
};

struct RocResult {
  double auc = 0.5;
  std::vector<RocPoint> points;  // from (0,0) to (1,1), non-decreasing in both axes
};

/// Mann-Whitney AUC (ties count 1/2) plus the threshold-sweep ROC curve.
/// Throws Error{Metric} unless both classes are present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Trapezoid area under a ROC curve.
double trapezoid_auc(std::span<const RocPoint> points);

struct CalibrationGroup {
  std::size_t n = 0;
  double observed = 0;  // events
  double expected = 0;  // sum of scores
  double mean_score = 0;
  double event_rate = 0;
  bool degenerate = false;  // expected == 0 or expected == n; excluded from chi-square
};

struct HosmerLemeshow {
  double chi_square = 0;
  double p_value = 1;
  int df = 0;
  std::vector<CalibrationGroup> groups;
};

/// Rows sorted by score and cut into `bins` near-equal groups; df = usable groups - 2 (at least 1).
HosmerLemeshow hosmer_lemeshow(std::span<const double> scores, std::span<const int> labels, std::size_t bins = 10);

struct Youden {
  double threshold = 0.5;
  double j = 0;
  double sensitivity = 0;
  double specificity = 0;
};

/// Cut-point maximizing sensitivity + specificity - 1 over midpoints between
/// adjacent distinct scores (lowest threshold on ties); positive means score >= threshold.
Youden youden_threshold(std::span<const double> scores, std::span<const int> labels);

/// Mean squared error between 0/1 labels and scores, and 1 - MSE / var(labels).
double mean_squared_error(std::span<const double> scores, std::span<const int> labels);
double r_squared(std::span<const double> scores, std::span<const int> labels);

struct PamResult {
  std::vector<std::size_t> medoids;      // row indices, in selection order
  std::vector<std::size_t> assignment;   // index into medoids per row
  double cost = 0;                       // sum of distances to assigned medoid
  std::vector<double> cost_trace;        // after BUILD, then after each swap
};

/// Partitioning Around Medoids (BUILD + SWAP) on a symmetric distance matrix.
PamResult pam(const Matrix& distances, std::size_t k);

/// PAM with Euclidean distances on z-standardized columns.
PamResult pam_cluster(const Matrix& data, std::size_t k);

Matrix euclidean_distances(const Matrix& data);

/// Adjusted Rand index via the contingency-table pair counts.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct Quartiles {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

/// Linear-interpolation quartiles (type 7).
Quartiles quartiles(std::span<const double> values);

}  // namespace cict::eval
