#pragma once
// Independent brute-force reference computations used by unit and acceptance tests.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace cict::oracle {

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Sample L-moment l_r by averaging the order-statistic kernel over every r-subset.
inline double l_moment_by_subsets(const std::vector<double>& sample, std::size_t r) {
  std::vector<double> x = sample;
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  double total = 0;
  std::size_t subsets = 0;
  std::vector<std::size_t> pick(r);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == r) {
      // pick is increasing, so x[pick[m]] is the (m+1)-th order statistic of the subset
      double kernel = 0;
      for (std::size_t k = 0; k < r; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        kernel += sign * binomial(r - 1, k) * x[pick[r - 1 - k]];
      }
      total += kernel / static_cast<double>(r);
      ++subsets;
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return total / static_cast<double>(subsets);
}

/// P(score_pos > score_neg) + 0.5 P(tie), by counting every pair.
inline double auc_by_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  double hits = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1;
      if (scores[i] > scores[j]) hits += 1;
      else if (scores[i] == scores[j]) hits += 0.5;
    }
  }
  return hits / pairs;
}

/// KS statistic by evaluating both ECDFs at every observed value.
inline double ks_by_ecdf(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0;
  auto visit = [&](double t) {
    std::size_t ca = 0, cb = 0;
    for (double v : a) ca += v <= t;
    for (double v : b) cb += v <= t;
    const double diff = static_cast<double>(ca) / na - static_cast<double>(cb) / nb;
    d = std::max(d, diff < 0 ? -diff : diff);
  };
  for (double t : a) visit(t);
  for (double t : b) visit(t);
  return d;
}

/// Adjusted Rand index from pair agreement counts enumerated over all point pairs.
inline double ari_by_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t n = a.size();
  double both = 0, same_a = 0, same_b = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      same_a += sa;
      same_b += sb;
    }
  const double nd = static_cast<double>(n);
  const double total = nd * (nd - 1.0) / 2.0;
  if (total == 0) return 1.0;
  const double expected = same_a * same_b / total;
  const double max_index = (same_a + same_b) / 2.0;
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

}  // namespace cict::oracle
