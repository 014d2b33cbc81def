#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cict/error.hpp"
#include "cict/eval.hpp"
#include "cict/model.hpp"
#include "cict/parallel.hpp"
#include "cict/rng.hpp"

namespace cict {
namespace {

constexpr std::uint64_t kTagFolds = 0xf01d5;
constexpr std::uint64_t kTagRepeat = 0x4e9ea7;
constexpr std::uint64_t kTagFoldModel = 0xf01d3d;

}  // namespace

MetricSummary summarize_metric(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<int> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed,
                                  std::span<const int> groups) {
  const std::size_t n = y.size();
  if (k < 2) throw Error(ErrorKind::Argument, "need at least 2 folds");
  if (!groups.empty() && groups.size() != n) throw Error(ErrorKind::Argument, "group ids do not match rows");

  // Units are single rows, or whole groups when group ids are supplied.
  std::map<int, std::vector<std::size_t>> unit_rows;
  if (groups.empty()) {
    for (std::size_t r = 0; r < n; ++r) unit_rows[static_cast<int>(r)].push_back(r);
  } else {
    for (std::size_t r = 0; r < n; ++r) unit_rows[groups[r]].push_back(r);
  }
  // Stratum = sorted label multiset of the unit.
  std::map<std::vector<int>, std::vector<int>> strata;
  for (const auto& [unit, rows] : unit_rows) {
    std::vector<int> key;
    for (auto r : rows) key.push_back(y[r]);
    std::sort(key.begin(), key.end());
    strata[key].push_back(unit);
  }

  std::map<int, std::size_t> class_count;
  for (int v : y) ++class_count[v];
  for (const auto& [cls, count] : class_count)
    if (count < k)
      throw Error(ErrorKind::Stratification, "class " + std::to_string(cls) + " has " + std::to_string(count) +
                                                 " rows, fewer than " + std::to_string(k) + " folds");

  Rng rng(derive_seed(seed, kTagFolds));
  std::vector<int> fold(n, -1);
  std::size_t next = 0;
  for (auto& [key, units] : strata) {
    rng.shuffle(std::span<int>(units));
    for (int u : units) {
      for (auto r : unit_rows[u]) fold[r] = static_cast<int>(next % k);
      ++next;
    }
  }

  // Each fold's held-out part must see every class, or AUC is undefined there.
  for (std::size_t f = 0; f < k; ++f) {
    std::map<int, std::size_t> seen;
    for (std::size_t r = 0; r < n; ++r)
      if (fold[r] == static_cast<int>(f)) ++seen[y[r]];
    if (seen.size() < class_count.size())
      throw Error(ErrorKind::Stratification, "fold " + std::to_string(f) + " lacks a class after stratification");
  }
  return fold;
}

CvReport cross_validate(const FeatureMatrix& x, std::span<const int> y, const TrainConfig& cfg,
                        std::span<const int> groups) {
  const std::size_t n = x.rows();
  if (cfg.k_folds < 2 || cfg.k_folds > n / 2)
    throw Error(ErrorKind::Config, "k_folds must lie in [2, n/2]");
  if (cfg.repeats == 0) throw Error(ErrorKind::Config, "repeats must be positive");

  CvReport report;
  report.repeats.resize(cfg.repeats);
  report.oob_auc.assign(cfg.repeats, 0.0);

  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.rng_seed, kTagRepeat, rep);
    const auto fold = stratified_folds(y, cfg.k_folds, rep_seed, groups);
    std::vector<double> pred(n, 0.0);
    std::vector<double> fold_oob(cfg.k_folds, std::numeric_limits<double>::quiet_NaN());

    parallel_for(cfg.k_folds, cfg.threads, [&](std::size_t f) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t r = 0; r < n; ++r) (fold[r] == static_cast<int>(f) ? test_rows : train_rows).push_back(r);
      const FeatureMatrix train_x = x.select_rows(train_rows);
      std::vector<int> train_y;
      for (auto r : train_rows) train_y.push_back(y[r]);
      TrainConfig fold_cfg = cfg;
      fold_cfg.rng_seed = derive_seed(rep_seed, kTagFoldModel, f);
      fold_cfg.threads = 1;
      const auto trained = train_forest(train_x, train_y, fold_cfg);
      for (auto r : test_rows) pred[r] = predict(trained.forest, x.values.row(r));

      std::vector<double> oob_scores;
      std::vector<int> oob_labels;
      for (std::size_t i = 0; i < train_rows.size(); ++i)
        if (!std::isnan(trained.oob.probability[i])) {
          oob_scores.push_back(trained.oob.probability[i]);
          oob_labels.push_back(train_y[i]);
        }
      const auto positives = std::count(oob_labels.begin(), oob_labels.end(), 1);
      if (positives > 0 && positives < static_cast<std::ptrdiff_t>(oob_labels.size()))
        fold_oob[f] = eval::roc_auc(oob_scores, oob_labels).auc;
    });

    std::vector<int> binary(y.begin(), y.end());
    for (auto& v : binary) v = v == 1 ? 1 : 0;
    auto& m = report.repeats[rep];
    m.auc = eval::roc_auc(pred, binary).auc;
    m.mse = eval::mean_squared_error(pred, binary);
    m.r2 = eval::r_squared(pred, binary);

    double acc = 0.0;
    std::size_t cnt = 0;
    for (double v : fold_oob)
      if (!std::isnan(v)) {
        acc += v;
        ++cnt;
      }
    report.oob_auc[rep] = cnt ? acc / static_cast<double>(cnt) : std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<double> aucs, mses, r2s;
  for (const auto& r : report.repeats) {
    aucs.push_back(r.auc);
    mses.push_back(r.mse);
    r2s.push_back(r.r2);
  }
  report.auc = summarize_metric(aucs);
  report.mse = summarize_metric(mses);
  report.r2 = summarize_metric(r2s);
  std::vector<double> oob;
  for (double v : report.oob_auc)
    if (!std::isnan(v)) oob.push_back(v);
  report.oob_auc_summary = summarize_metric(oob);
  return report;
}

}  // namespace cict
