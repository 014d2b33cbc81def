#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cict/eval.hpp"
#include "cict/features.hpp"
#include "cict/model.hpp"

namespace cict {

inline constexpr int kReportVersion = 1;

struct ClusteringResult {
  std::size_t k = 2;
  double ari = 0;
  std::vector<std::size_t> medoids;
  std::vector<std::size_t> assignment;
  std::vector<int> truth;          // class per row used for the ARI
  Matrix pca_coords;               // rows x 2
  std::vector<double> explained;   // variance ratio of the plotted axes
};

struct CvSummary {
  MetricSummary auc, mse, r2, oob_auc;
  std::size_t repeats = 0;
  std::size_t folds = 0;
};

/// Metrics and plot-ready series for one scored set.
struct EvaluationReport {
  double auc = 0, mse = 0, r2 = 0;
  eval::HosmerLemeshow hosmer_lemeshow;
  eval::Youden youden;
  std::vector<eval::RocPoint> roc_points;
  eval::Quartiles negative_scores, positive_scores;  // discrimination box-plot data
  std::optional<CvSummary> cv;
  std::optional<ClusteringResult> clustering;
  std::map<std::string, double> metrics;  // experiment-level scalars
  std::map<std::string, std::string> info;

  std::string to_json() const;
  static EvaluationReport from_json(std::string_view text);
};

CvSummary summarize_cv(const CvReport& cv, std::size_t folds);

EvaluationReport assemble_report(const std::optional<CvSummary>& cv, std::span<const double> scores,
                                 std::span<const int> labels,
                                 const std::optional<ClusteringResult>& clustering = std::nullopt);

/// PAM on standardized features, PCA axes for plotting, ARI against truth.
ClusteringResult cluster_edges(const Matrix& features, std::span<const int> truth, std::size_t k);

/// roc.csv, calibration.csv, score_dist.csv and (with clustering) clusters.csv.
void write_plot_series(const std::filesystem::path& dir, const EvaluationReport& report,
                       const std::vector<EdgeKey>* cluster_keys = nullptr);

/// clusters.csv layout: source,target,cluster,is_medoid,pc1,pc2,label.
void write_cluster_series(const std::filesystem::path& path, const ClusteringResult& c,
                          const std::vector<EdgeKey>* cluster_keys = nullptr);

}  // namespace cict
