#include "cict/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "cict/error.hpp"

namespace cict::stats {
namespace {

std::vector<double> sorted_copy(Sample s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// C(m, r) as double; zero when m < r.
double choose(double m, int r) {
  if (m < r) return 0.0;
  double c = 1.0;
  for (int i = 0; i < r; ++i) c *= (m - i) / (i + 1);
  return c;
}

}  // namespace

bool DistributionSummary::fully_defined() const noexcept {
  return mean && sd && skewness && kurtosis && median && mad && l1 && l2 && l3 && l4 && min && max;
}

double mean(Sample s) {
  if (s.empty()) return 0.0;
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double median(Sample s) {
  if (s.empty()) return 0.0;
  return median_of_sorted(sorted_copy(s));
}

double population_sd(Sample s) {
  if (s.empty()) return 0.0;
  const double m = mean(s);
  double ss = 0.0;
  for (double x : s) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(s.size()));
}

Moments moments(Sample s) {
  Moments out;
  const std::size_t n = s.size();
  if (n == 0) return out;
  const double nd = static_cast<double>(n);
  const double m = mean(s);
  out.mean = m;
  if (n < 2) return out;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : s) {
    const double d = x - m;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  out.sd = std::sqrt(m2 / (nd - 1.0));
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;
  // Relative threshold so that floating-point residue of a constant sample
  // counts as zero spread.
  const bool flat = m2 <= 1e-28 * std::max(1.0, m * m);
  if (n >= 3) {
    if (flat) {
      out.skewness = 0.0;
    } else {
      const double g1 = m3 / std::pow(m2, 1.5);
      out.skewness = std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * g1;
    }
  }
  if (n >= 4) {
    if (flat) {
      out.kurtosis = 0.0;
    } else {
      const double g2 = m4 / (m2 * m2) - 3.0;
      out.kurtosis = ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
    }
  }
  if (flat) out.sd = 0.0;
  return out;
}

MedianMad median_mad(Sample s) {
  MedianMad out;
  if (s.empty()) return out;
  const auto v = sorted_copy(s);
  const double med = median_of_sorted(v);
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [med](double x) { return std::abs(x - med); });
  std::sort(dev.begin(), dev.end());
  out.median = med;
  out.mad = median_of_sorted(dev);
  return out;
}

LMoments l_moments(Sample s) {
  LMoments out;
  const std::size_t n = s.size();
  if (n == 0) return out;
  const auto x = sorted_copy(s);
  const double nd = static_cast<double>(n);

  // Weight of the i-th order statistic (1-based) in each estimator, counting
  // how often it lands in each rank position across all r-subsets.
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double below = static_cast<double>(idx);           // i - 1
    const double above = static_cast<double>(n - idx - 1);   // n - i
    const double xi = x[idx];
    s1 += xi;
    s2 += (choose(below, 1) - choose(above, 1)) * xi;
    s3 += (choose(below, 2) - 2.0 * choose(below, 1) * choose(above, 1) + choose(above, 2)) * xi;
    s4 += (choose(below, 3) - 3.0 * choose(below, 2) * choose(above, 1) +
           3.0 * choose(below, 1) * choose(above, 2) - choose(above, 3)) *
          xi;
  }
  out.l1 = s1 / nd;
  if (n >= 2) out.l2 = std::max(0.0, s2 / (2.0 * choose(nd, 2)));
  if (n >= 3) out.l3 = s3 / (3.0 * choose(nd, 3));
  if (n >= 4) out.l4 = s4 / (4.0 * choose(nd, 4));
  return out;
}

DistributionSummary summarize(Sample s) {
  DistributionSummary d;
  d.n = s.size();
  const auto mo = moments(s);
  d.mean = mo.mean;
  d.sd = mo.sd;
  d.skewness = mo.skewness;
  d.kurtosis = mo.kurtosis;
  const auto mm = median_mad(s);
  d.median = mm.median;
  d.mad = mm.mad;
  const auto lm = l_moments(s);
  d.l1 = lm.l1;
  d.l2 = lm.l2;
  d.l3 = lm.l3;
  d.l4 = lm.l4;
  if (!s.empty()) {
    auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    d.min = *lo;
    d.max = *hi;
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series is numerically useless for tiny lambda, where the
  // distribution function is effectively 0.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(Sample a, Sample b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::Argument, "ks_two_sample needs two non-empty samples");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double ne = na * nb / (na + nb);
  r.p_value = kolmogorov_sf(std::sqrt(ne) * d);
  return r;
}

double chi_square_sf(double x, double df) {
  if (df <= 0.0) throw Error(ErrorKind::Argument, "chi-square needs positive degrees of freedom");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

ZScore zscore(double x, Sample s) {
  if (s.size() < 2) return {0.0, true};
  const double sd = population_sd(s);
  const double m = mean(s);
  if (!(sd > 1e-14 * std::max(1.0, std::abs(m)))) return {0.0, true};
  return {(x - m) / sd, false};
}

Matrix standardize_columns(const Matrix& data, std::vector<std::size_t>* kept) {
  std::vector<std::size_t> cols;
  std::vector<double> means, sds;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    const auto col = data.column(c);
    const double m = mean(col);
    const double sd = population_sd(col);
    if (sd > 1e-12 * std::max(1.0, std::abs(m))) {
      cols.push_back(c);
      means.push_back(m);
      sds.push_back(sd);
    }
  }
  Matrix out(data.rows(), cols.size());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t k = 0; k < cols.size(); ++k) out(r, k) = (data(r, cols[k]) - means[k]) / sds[k];
  if (kept) *kept = std::move(cols);
  return out;
}

PcaResult pca(const Matrix& data, std::size_t k) {
  if (data.rows() < 2) throw Error(ErrorKind::Argument, "pca needs at least two rows");
  PcaResult res;
  res.standardized = standardize_columns(data, &res.kept_columns);
  const std::size_t p = res.kept_columns.size();
  if (p == 0) throw Error(ErrorKind::Argument, "pca: every column has zero variance");
  k = std::min(k, p);
  if (k == 0) throw Error(ErrorKind::Argument, "pca needs k >= 1");

  const std::size_t n = data.rows();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> z(
      res.standardized.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Argument, "pca eigen-decomposition failed");

  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double total = std::max(values.sum(), 0.0);

  res.components = Matrix(k, p);
  res.explained_ratio.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(p - 1 - c);
    Eigen::VectorXd v = vectors.col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    for (std::size_t j = 0; j < p; ++j) res.components(c, j) = v(static_cast<Eigen::Index>(j));
    res.explained_ratio[c] = total > 0 ? std::max(values(col), 0.0) / total : 0.0;
  }
  res.projected = Matrix(n, k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += res.standardized(r, j) * res.components(c, j);
      res.projected(r, c) = acc;
    }
  return res;
}

}  // namespace cict::stats
