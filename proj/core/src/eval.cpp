#include "cict/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cict/error.hpp"
#include "cict/stats.hpp"

namespace cict::eval {
namespace {

void check_scored(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::Argument, "scores and labels differ in length");
  for (int l : labels)
    if (l != 0 && l != 1) throw Error(ErrorKind::Argument, "labels must be 0 or 1");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return idx;
}

double pairs(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_scored(scores, labels);
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::Metric, "AUC needs both classes");

  const auto idx = order_by_score(scores);
  // Rank-sum with mid-ranks for ties.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]] == 1) rank_sum += mid;
    i = j;
  }
  const double np = static_cast<double>(pos);
  const double nn = static_cast<double>(neg);
  RocResult res;
  res.auc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);

  // Sweep thresholds from high to low over distinct scores.
  res.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = idx.size(); i > 0;) {
    const double s = scores[idx[i - 1]];
    while (i > 0 && scores[idx[i - 1]] == s) {
      (labels[idx[i - 1]] == 1 ? tp : fp) += 1;
      --i;
    }
    res.points.push_back({s, static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
  }
  return res;
}

double trapezoid_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  return area;
}

HosmerLemeshow hosmer_lemeshow(std::span<const double> scores, std::span<const int> labels, std::size_t bins) {
  check_scored(scores, labels);
  const std::size_t n = scores.size();
  if (bins < 2) throw Error(ErrorKind::Argument, "Hosmer-Lemeshow needs at least 2 groups");
  if (n < bins) throw Error(ErrorKind::Metric, "Hosmer-Lemeshow needs at least as many rows as groups");
  const auto idx = order_by_score(scores);

  HosmerLemeshow hl;
  std::size_t usable = 0;
  for (std::size_t g = 0; g < bins; ++g) {
    const std::size_t begin = n * g / bins;
    const std::size_t end = n * (g + 1) / bins;
    CalibrationGroup grp;
    grp.n = end - begin;
    for (std::size_t k = begin; k < end; ++k) {
      grp.observed += labels[idx[k]];
      grp.expected += scores[idx[k]];
    }
    const double ng = static_cast<double>(grp.n);
    grp.mean_score = grp.expected / ng;
    grp.event_rate = grp.observed / ng;
    const double tol = 1e-12 * ng;
    grp.degenerate = grp.expected <= tol || grp.expected >= ng - tol;
    if (!grp.degenerate) {
      const double diff = grp.observed - grp.expected;
      hl.chi_square += diff * diff / (grp.expected * (1.0 - grp.expected / ng));
      ++usable;
    }
    hl.groups.push_back(grp);
  }
  hl.df = std::max(1, static_cast<int>(usable) - 2);
  hl.p_value = usable == 0 ? 1.0 : stats::chi_square_sf(hl.chi_square, hl.df);
  return hl;
}

Youden youden_threshold(std::span<const double> scores, std::span<const int> labels) {
  check_scored(scores, labels);
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::Metric, "Youden index needs both classes");
  const auto idx = order_by_score(scores);
  const double np = static_cast<double>(pos);
  const double nn = static_cast<double>(neg);

  // Everything predicted positive at the lowest score.
  Youden best;
  best.threshold = scores[idx.front()];
  best.sensitivity = 1.0;
  best.specificity = 0.0;
  best.j = 0.0;

  // Walk ascending; after consuming a block of equal scores, the cut sits
  // between this block and the next distinct score.
  std::size_t neg_below = 0, pos_below = 0;
  bool have_candidate = false;
  for (std::size_t i = 0; i < idx.size();) {
    const double s = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == s) {
      (labels[idx[i]] == 1 ? pos_below : neg_below) += 1;
      ++i;
    }
    if (i == idx.size()) break;
    const double next = scores[idx[i]];
    const double sens = (np - static_cast<double>(pos_below)) / np;
    const double spec = static_cast<double>(neg_below) / nn;
    const double j = sens + spec - 1.0;
    if (!have_candidate || j > best.j) {
      best = Youden{s + (next - s) / 2.0, j, sens, spec};
      have_candidate = true;
    }
  }
  return best;
}

double mean_squared_error(std::span<const double> scores, std::span<const int> labels) {
  check_scored(scores, labels);
  if (scores.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = static_cast<double>(labels[i]) - scores[i];
    acc += d * d;
  }
  return acc / static_cast<double>(scores.size());
}

double r_squared(std::span<const double> scores, std::span<const int> labels) {
  const double mse = mean_squared_error(scores, labels);
  const double p = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / static_cast<double>(labels.size());
  const double var = p * (1.0 - p);
  if (var <= 0) throw Error(ErrorKind::Metric, "R^2 undefined for a single class");
  return 1.0 - mse / var;
}

Matrix euclidean_distances(const Matrix& data) {
  const std::size_t n = data.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      auto a = data.row(i);
      auto b = data.row(j);
      for (std::size_t c = 0; c < a.size(); ++c) acc += (a[c] - b[c]) * (a[c] - b[c]);
      d(i, j) = d(j, i) = std::sqrt(acc);
    }
  return d;
}

PamResult pam(const Matrix& dist, std::size_t k) {
  const std::size_t n = dist.rows();
  if (dist.cols() != n) throw Error(ErrorKind::Argument, "distance matrix must be square");
  if (k < 1 || k > n) throw Error(ErrorKind::Argument, "pam needs 1 <= k <= rows");

  std::vector<char> is_medoid(n, 0);
  std::vector<std::size_t> medoids;
  // nearest / second-nearest medoid distances
  std::vector<double> d1(n, std::numeric_limits<double>::infinity());

  // BUILD: greedily add the point that lowers total cost the most.
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double gain = 0.0;
      if (step == 0) {
        for (std::size_t j = 0; j < n; ++j) gain -= dist(c, j);
      } else {
        for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, d1[j] - dist(c, j));
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    is_medoid[best] = 1;
    medoids.push_back(best);
    for (std::size_t j = 0; j < n; ++j) d1[j] = std::min(d1[j], dist(best, j));
  }

  auto total_cost = [&](const std::vector<std::size_t>& meds) {
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double m = std::numeric_limits<double>::infinity();
      for (auto md : meds) m = std::min(m, dist(md, j));
      c += m;
    }
    return c;
  };

  PamResult res;
  double cost = total_cost(medoids);
  res.cost_trace.push_back(cost);

  // SWAP: apply the single best improving (medoid, non-medoid) exchange until none improves.
  for (std::size_t iter = 0; iter < 1000; ++iter) {
    std::vector<double> near(n), second(n);
    std::vector<std::size_t> near_idx(n);
    for (std::size_t j = 0; j < n; ++j) {
      double a = std::numeric_limits<double>::infinity(), b = a;
      std::size_t ai = 0;
      for (std::size_t m = 0; m < medoids.size(); ++m) {
        const double v = dist(medoids[m], j);
        if (v < a) {
          b = a;
          a = v;
          ai = m;
        } else if (v < b) {
          b = v;
        }
      }
      near[j] = a;
      second[j] = b;
      near_idx[j] = ai;
    }
    double best_delta = 0.0;
    std::size_t best_m = 0, best_h = n;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double dh = dist(h, j);
          if (near_idx[j] == m) {
            delta += std::min(dh, second[j]) - near[j];
          } else if (dh < near[j]) {
            delta += dh - near[j];
          }
        }
        if (delta < best_delta - 1e-12 * std::max(1.0, cost)) {
          best_delta = delta;
          best_m = m;
          best_h = h;
        }
      }
    }
    if (best_h == n) break;
    is_medoid[medoids[best_m]] = 0;
    is_medoid[best_h] = 1;
    medoids[best_m] = best_h;
    cost = total_cost(medoids);
    res.cost_trace.push_back(cost);
  }

  res.medoids = medoids;
  res.assignment.resize(n);
  res.cost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = 0;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < medoids.size(); ++q)
      if (dist(medoids[q], j) < m) {
        m = dist(medoids[q], j);
        arg = q;
      }
    res.assignment[j] = arg;
    res.cost += m;
  }
  return res;
}

PamResult pam_cluster(const Matrix& data, std::size_t k) {
  if (k < 1 || k > data.rows()) throw Error(ErrorKind::Argument, "pam needs 1 <= k <= rows");
  return pam(euclidean_distances(stats::standardize_columns(data)), k);
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Argument, "partitions differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [_, c] : table) index += pairs(c);
  for (const auto& [_, c] : rows) sum_a += pairs(c);
  for (const auto& [_, c] : cols) sum_b += pairs(c);
  const double total = pairs(n);
  if (total == 0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) return 1.0;  // both partitions trivial and identical in structure
  return (index - expected) / (max_index - expected);
}

Quartiles quartiles(std::span<const double> values) {
  Quartiles q;
  q.n = values.size();
  if (values.empty()) return q;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  q.min = v.front();
  q.max = v.back();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.mean = stats::mean(v);
  return q;
}

}  // namespace cict::eval
