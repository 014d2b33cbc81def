#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cict/matrix.hpp"

namespace cict::stats {

using Sample = std::span<const double>;

/// A statistic that may be undefined for too-small samples.
using Stat = std::optional<double>;

struct Moments {
  Stat mean;      // n >= 1
  Stat sd;        // n >= 2, n-1 denominator
  Stat skewness;  // n >= 3, adjusted Fisher-Pearson G1; 0 on zero spread
  Stat kurtosis;  // n >= 4, sample excess kurtosis G2; 0 on zero spread
};

struct MedianMad {
  Stat median;
  Stat mad;  // unscaled
};

struct LMoments {
  Stat l1, l2, l3, l4;  // l_k needs n >= k
};

struct DistributionSummary {
  std::size_t n = 0;
  Stat mean, sd, skewness, kurtosis;
  Stat median, mad;
  Stat l1, l2, l3, l4;
  Stat min, max;

  bool fully_defined() const noexcept;
};

Moments moments(Sample s);
MedianMad median_mad(Sample s);

/// Unbiased sample L-moments from the direct order-statistic U-statistic form.
LMoments l_moments(Sample s);

DistributionSummary summarize(Sample s);

double mean(Sample s);       // 0 for empty
double median(Sample s);     // 0 for empty
double population_sd(Sample s);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov. Throws Error{Argument} on an empty sample.
KsResult ks_two_sample(Sample a, Sample b);

/// Survival function of the asymptotic Kolmogorov distribution, Q(lambda).
double kolmogorov_sf(double lambda);

/// Chi-square upper tail probability.
double chi_square_sf(double x, double df);

struct ZScore {
  double value = 0.0;
  bool degenerate = false;  // n < 2 or zero spread; value is then 0
};

/// (x - mean) / population sd.
ZScore zscore(double x, Sample s);

struct PcaResult {
  std::vector<std::size_t> kept_columns;  // columns with non-zero variance
  Matrix components;                      // k x kept, orthonormal rows
  Matrix projected;                       // rows x k
  std::vector<double> explained_ratio;    // non-increasing
  Matrix standardized;                    // rows x kept
};

/// PCA of the column-standardized matrix via covariance eigen-decomposition.
/// Each component's largest-magnitude loading is made positive.
PcaResult pca(const Matrix& data, std::size_t k);

/// Column standardization (population sd); zero-variance columns are dropped.
Matrix standardize_columns(const Matrix& data, std::vector<std::size_t>* kept = nullptr);

}  // namespace cict::stats
