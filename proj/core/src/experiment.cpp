#include "cict/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cict/csv.hpp"
#include "cict/error.hpp"
#include "cict/eval.hpp"
#include "cict/rng.hpp"

namespace cict {
namespace {

constexpr std::uint64_t kSplitRepeatTag = 0x5e9117;
constexpr std::uint64_t kTrainTag = 0x7a1d;
constexpr std::uint64_t kCvTag = 0xc7;
constexpr std::uint64_t kFreshTag = 0xf4e5;
constexpr std::uint64_t kDirectionTag = 0xd14;

struct Task {
  std::vector<EdgeLabel> positive;
  std::vector<EdgeLabel> negative;
};

Task task_for(SetMode mode) {
  switch (mode) {
    case SetMode::RandomVsCausal: return {{EdgeLabel::Causal}, {EdgeLabel::Random}};
    case SetMode::Direction: return {{EdgeLabel::Causal}, {EdgeLabel::ReverseCausal}};
    case SetMode::Mixed: return {{EdgeLabel::Causal, EdgeLabel::ReverseCausal}, {EdgeLabel::Random}};
  }
  return {};
}

int binary_label(const Task& t, EdgeLabel l) {
  return std::find(t.positive.begin(), t.positive.end(), l) != t.positive.end() ? 1 : 0;
}

// Repeated train/test splits of one labeled sample.
struct SplitRun {
  std::vector<double> auc, mse, r2, hl_p;
  std::vector<double> pooled_scores;  // held-out predictions of every repeat
  std::vector<int> pooled_labels;
  TrainResult first;                   // model of repeat 0
  std::vector<std::size_t> first_train, first_test;
  std::vector<double> first_scores;
};

SplitRun run_splits(const std::vector<LabeledKey>& sample, const FeatureMatrix& x, const std::vector<int>& y,
                    const TrainConfig& base, std::size_t repeats, double train_fraction, std::uint64_t seed,
                    unsigned threads) {
  std::map<EdgeKey, std::size_t> row_of;
  for (std::size_t i = 0; i < sample.size(); ++i) row_of[sample[i].key] = i;
  SplitRun run;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto sets = split_edges(sample, train_fraction, derive_seed(seed, kSplitRepeatTag, r));
    std::vector<std::size_t> tr, te;
    for (const auto& k : sets.train) tr.push_back(row_of.at(k.key));
    for (const auto& k : sets.test) te.push_back(row_of.at(k.key));
    std::vector<int> ytr, yte;
    for (auto i : tr) ytr.push_back(y[i]);
    for (auto i : te) yte.push_back(y[i]);
    TrainConfig cfg = base;
    cfg.rng_seed = derive_seed(seed, kTrainTag, r);
    cfg.threads = threads;
    auto model = train_forest(x.select_rows(tr), ytr, cfg);
    const auto scores = predict(model.forest, x.select_rows(te), threads);
    run.auc.push_back(eval::roc_auc(scores, yte).auc);
    run.mse.push_back(eval::mean_squared_error(scores, yte));
    run.r2.push_back(eval::r_squared(scores, yte));
    run.hl_p.push_back(eval::hosmer_lemeshow(scores, yte, std::min<std::size_t>(10, scores.size())).p_value);
    run.pooled_scores.insert(run.pooled_scores.end(), scores.begin(), scores.end());
    run.pooled_labels.insert(run.pooled_labels.end(), yte.begin(), yte.end());
    if (r == 0) {
      run.first = std::move(model);
      run.first_train = tr;
      run.first_test = te;
      run.first_scores = scores;
    }
  }
  return run;
}

std::vector<int> labels_of(const std::vector<LabeledKey>& sample, const Task& task) {
  std::vector<int> y;
  for (const auto& s : sample) y.push_back(binary_label(task, s.label));
  return y;
}

std::vector<EdgeKey> keys_of(const std::vector<LabeledKey>& sample) {
  std::vector<EdgeKey> k;
  for (const auto& s : sample) k.push_back(s.key);
  return k;
}

std::vector<std::size_t> default_sizes(Preset p, const std::vector<std::pair<EdgeKey, EdgeLabel>>& candidates) {
  switch (p) {
    case Preset::Exp1: return {267, 267};
    case Preset::Exp2: return {225, 225};
    case Preset::Exp3: return {250, 90, 840};
    case Preset::Exp4: {
      std::size_t causal = 0, random = 0;
      for (const auto& [k, l] : candidates) {
        if (l == EdgeLabel::Causal) ++causal;
        if (l == EdgeLabel::Random) ++random;
      }
      const std::size_t n = std::min({causal, random, std::size_t{161}});
      return {n, n};
    }
  }
  return {};
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "exp1") return Preset::Exp1;
  if (name == "exp2") return Preset::Exp2;
  if (name == "exp3") return Preset::Exp3;
  if (name == "exp4") return Preset::Exp4;
  throw Error(ErrorKind::Config, "unknown preset '" + name + "' (exp1|exp2|exp3|exp4)");
}

std::string_view to_string(Preset p) noexcept {
  switch (p) {
    case Preset::Exp1: return "exp1";
    case Preset::Exp2: return "exp2";
    case Preset::Exp3: return "exp3";
    case Preset::Exp4: return "exp4";
  }
  return "exp1";
}

ExperimentConfig ExperimentConfig::preset_config(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  c.direction = TrainConfig::experiment_two();
  switch (p) {
    case Preset::Exp1:
      c.mode = SetMode::RandomVsCausal;
      c.train = TrainConfig::experiment_one();
      break;
    case Preset::Exp2:
      c.mode = SetMode::Direction;
      c.train = TrainConfig::experiment_two();
      break;
    case Preset::Exp3:
      c.mode = SetMode::Mixed;
      c.train = TrainConfig::experiment_two();
      c.train.repeats = 10;  // the CV summary is secondary here; keeps the run short
      break;
    case Preset::Exp4:
      c.mode = SetMode::RandomVsCausal;
      c.train = TrainConfig::experiment_one();
      c.train_fraction = 0.6;
      break;
  }
  return c;
}

std::vector<std::pair<EdgeKey, EdgeLabel>> labeled_candidates(const TransitionNetwork& net, const LabelMap& labels,
                                                              std::size_t min_count) {
  GroundTruth truth;
  truth.planted = labels;
  std::vector<std::pair<EdgeKey, EdgeLabel>> out;
  for (const auto& e : net.edges()) {
    if (e.source == e.target || e.count < min_count) continue;
    EdgeKey k{net.node(e.source).code, net.node(e.target).code};
    const auto l = truth.label(k.source, k.target);
    out.emplace_back(std::move(k), l);
  }
  return out;
}

ExperimentResult run_experiment(const TransitionNetwork& net, const LabelMap& labels, const ExperimentConfig& cfg) {
  if (cfg.split_repeats == 0) throw Error(ErrorKind::Config, "split_repeats must be positive");
  const auto candidates = labeled_candidates(net, labels, cfg.min_edge_count);
  const auto sizes = cfg.sizes.empty() ? default_sizes(cfg.preset, candidates) : cfg.sizes;
  const Task task = task_for(cfg.mode);

  ExperimentResult res;
  res.sample = sample_edges(candidates, cfg.mode, sizes, cfg.seed);
  res.features = featurize_edges(net, keys_of(res.sample), cfg.threads);
  const auto y = labels_of(res.sample, task);

  auto run = run_splits(res.sample, res.features, y, cfg.train, cfg.split_repeats, cfg.train_fraction, cfg.seed,
                        cfg.threads);
  res.heldout_auc = run.auc;
  res.hl_p = run.hl_p;
  res.model = std::move(run.first.forest);
  res.importance = variable_importance(res.model);

  // k-fold CV on the first training split.
  std::optional<CvSummary> cv;
  if (cfg.train.repeats > 0 && cfg.train.k_folds > 1) {
    std::vector<int> ytr, groups;
    for (auto i : run.first_train) {
      ytr.push_back(y[i]);
      groups.push_back(res.sample[i].group);
    }
    TrainConfig c = cfg.train;
    c.rng_seed = derive_seed(cfg.seed, kCvTag);
    c.threads = cfg.threads;
    cv = summarize_cv(cross_validate(res.features.select_rows(run.first_train), ytr, c, groups), c.k_folds);
  }

  std::vector<int> yte;
  for (auto i : run.first_test) yte.push_back(y[i]);
  auto clustering = cluster_edges(res.features.values, y, cfg.cluster_k);
  res.report = assemble_report(cv, run.first_scores, yte, clustering);

  auto& m = res.report.metrics;
  const auto auc = summarize_metric(run.auc);
  m["heldout_auc_mean"] = auc.mean;
  m["heldout_auc_sd"] = auc.sd;
  m["heldout_mse_mean"] = mean_of(run.mse);
  m["heldout_r2_mean"] = mean_of(run.r2);
  m["hl_pass_count"] = static_cast<double>(std::count_if(run.hl_p.begin(), run.hl_p.end(), [](double p) { return p > 0.05; }));
  m["split_repeats"] = static_cast<double>(cfg.split_repeats);
  m["ari"] = clustering.ari;
  m["sample_rows"] = static_cast<double>(res.sample.size());
  auto& info = res.report.info;
  info["preset"] = std::string(to_string(cfg.preset));
  info["feature_schema"] = std::string(kFeatureSchemaVersion);
  std::string sz;
  for (auto s : sizes) sz += (sz.empty() ? "" : ",") + std::to_string(s);
  info["sizes"] = sz;
  info["train_fraction"] = csv::format_double(cfg.train_fraction);
  info["seed"] = std::to_string(cfg.seed);

  if (cfg.preset != Preset::Exp3) return res;

  // Direction model on the sampled causal edges and their observed reverses.
  std::vector<std::pair<EdgeKey, EdgeLabel>> dir_candidates;
  std::set<EdgeKey> present;
  for (const auto& e : net.edges()) present.insert(EdgeKey{net.node(e.source).code, net.node(e.target).code});
  for (const auto& s : res.sample) {
    if (s.label != EdgeLabel::Causal) continue;
    EdgeKey rev{s.key.target, s.key.source};
    if (!present.count(rev)) continue;
    dir_candidates.emplace_back(s.key, EdgeLabel::Causal);
    dir_candidates.emplace_back(rev, EdgeLabel::ReverseCausal);
  }
  const std::size_t pairs = dir_candidates.size() / 2;
  const auto dir_sample = sample_edges(dir_candidates, SetMode::Direction, {pairs, pairs}, cfg.seed);
  const auto dir_x = featurize_edges(net, keys_of(dir_sample), cfg.threads);
  const auto dir_y = labels_of(dir_sample, task_for(SetMode::Direction));
  auto dir_run = run_splits(dir_sample, dir_x, dir_y, cfg.direction, cfg.split_repeats, cfg.train_fraction,
                            derive_seed(cfg.seed, kDirectionTag), cfg.threads);
  const auto t_measure = eval::youden_threshold(run.pooled_scores, run.pooled_labels);
  const auto t_direction = eval::youden_threshold(dir_run.pooled_scores, dir_run.pooled_labels);

  // Fresh edges never used for training either model.
  std::set<EdgeKey> used;
  for (const auto& s : res.sample) used.insert(s.key);
  for (const auto& s : dir_sample) used.insert(s.key);
  std::vector<EdgeKey> pool;
  std::map<EdgeKey, EdgeLabel> truth_of;
  for (const auto& [k, l] : candidates)
    if (!used.count(k)) {
      pool.push_back(k);
      truth_of[k] = l;
    }
  if (pool.size() < cfg.fresh_sample)
    throw Error(ErrorKind::Sampling, "not enough fresh edges: need " + std::to_string(cfg.fresh_sample) + ", have " +
                                         std::to_string(pool.size()));
  Rng rng(derive_seed(cfg.seed, kFreshTag));
  rng.shuffle(std::span<EdgeKey>(pool));
  pool.resize(cfg.fresh_sample);
  std::sort(pool.begin(), pool.end());
  const auto fresh_x = featurize_edges(net, pool, cfg.threads);
  const auto measure = predict(res.model, fresh_x, cfg.threads);
  const auto direction = predict(dir_run.first.forest, fresh_x, cfg.threads);

  std::map<EdgeKey, RetainedEdge> kept;
  std::size_t fresh_causal = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    fresh_causal += truth_of[pool[i]] == EdgeLabel::Causal;
    if (measure[i] >= t_measure.threshold && direction[i] >= t_direction.threshold)
      kept[pool[i]] = RetainedEdge{pool[i], measure[i], direction[i], truth_of[pool[i]]};
  }
  // Both directions retained: keep the one the direction model prefers.
  for (auto it = kept.begin(); it != kept.end();) {
    const auto rev = kept.find(EdgeKey{it->first.target, it->first.source});
    if (rev != kept.end() && (rev->second.direction > it->second.direction ||
                              (rev->second.direction == it->second.direction && rev->first < it->first)))
      it = kept.erase(it);
    else
      ++it;
  }
  for (auto& [k, r] : kept) res.retained.push_back(r);
  std::stable_sort(res.retained.begin(), res.retained.end(), [](const RetainedEdge& a, const RetainedEdge& b) {
    if (a.measure != b.measure) return a.measure > b.measure;
    return a.key < b.key;
  });
  const auto causal = static_cast<double>(std::count_if(
      res.retained.begin(), res.retained.end(), [](const RetainedEdge& r) { return r.truth == EdgeLabel::Causal; }));
  m["youden_measure"] = t_measure.threshold;
  m["youden_direction"] = t_direction.threshold;
  m["direction_auc_mean"] = mean_of(dir_run.auc);
  m["fresh_edges"] = static_cast<double>(pool.size());
  m["fresh_causal"] = static_cast<double>(fresh_causal);
  m["retained"] = static_cast<double>(res.retained.size());
  m["retained_causal"] = causal;
  m["retained_precision"] = res.retained.empty() ? 0.0 : causal / static_cast<double>(res.retained.size());
  return res;
}

std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& body) {
    auto out = csv::open_output(dir / name);
    body(out);
    written.push_back(dir / name);
  };
  emit("report.json", [&](std::ostream& o) { o << r.report.to_json() << '\n'; });
  emit("model.json", [&](std::ostream& o) { o << r.model.to_json() << '\n'; });
  emit("features.csv", [&](std::ostream& o) { write_feature_csv(o, r.features); });
  emit("labels.csv", [&](std::ostream& o) {
    LabelMap m;
    for (const auto& s : r.sample) m[s.key] = s.label;
    write_label_csv(o, m);
  });
  emit("importance.csv", [&](std::ostream& o) {
    o << "rank,feature,importance\n";
    std::size_t rank = 1;
    for (const auto& imp : r.importance)
      csv::write_row(o, {std::to_string(rank++), imp.feature, csv::format_double(imp.value)});
  });
  write_plot_series(dir, r.report, &r.features.keys);
  for (const char* f : {"roc.csv", "calibration.csv", "score_dist.csv"}) written.push_back(dir / f);
  if (r.report.clustering) written.push_back(dir / "clusters.csv");
  if (r.report.info.count("preset") && r.report.info.at("preset") == "exp3") {
    emit("retained.csv", [&](std::ostream& o) {
      o << "measure,source,target,direction,label\n";
      for (const auto& e : r.retained)
        csv::write_row(o, {csv::format_double(e.measure), e.key.source, e.key.target, csv::format_double(e.direction),
                           std::string(to_string(e.truth))});
    });
  }
  return written;
}

Grouping read_grouping_csv(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  const auto c = table.column("code");
  const auto g = table.column("group");
  Grouping out;
  for (const auto& row : table.rows) out[row[c]] = row[g];
  return out;
}

Grouping round_robin_grouping(const std::vector<std::string>& codes, std::size_t groups) {
  if (groups == 0) throw Error(ErrorKind::Argument, "grouping needs at least one group");
  Grouping out;
  const std::size_t width = groups > 100 ? std::to_string(groups - 1).size() : 2;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    std::string id = std::to_string(i % groups);
    if (id.size() < width) id.insert(0, width - id.size(), '0');
    out[codes[i]] = "G" + id;
  }
  return out;
}

SequenceDataset apply_grouping(const SequenceDataset& ds, const Grouping& g) {
  SequenceDataset out = ds;
  for (auto& h : out.entities)
    for (auto& e : h.events) {
      const auto it = g.find(e.event_code);
      if (it == g.end()) throw Error(ErrorKind::Consistency, "grouping has no entry for code '" + e.event_code + "'");
      e.event_code = it->second;
    }
  return out;
}

LabelMap group_labels(const LabelMap& labels, const Grouping& g) {
  LabelMap out;
  for (const auto& [k, l] : labels) {
    const auto s = g.find(k.source);
    const auto t = g.find(k.target);
    if (s == g.end() || t == g.end() || s->second == t->second) continue;
    EdgeKey gk{s->second, t->second};
    auto [it, inserted] = out.try_emplace(gk, l);
    if (!inserted && l == EdgeLabel::Causal) it->second = l;
  }
  return out;
}

}  // namespace cict
