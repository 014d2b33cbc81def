#include "cict/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "cict/error.hpp"
#include "cict/hash.hpp"
#include "cict/parallel.hpp"
#include "cict/rng.hpp"

namespace cict {
namespace {

constexpr int kForestFormatVersion = 1;
constexpr std::uint64_t kTagBootstrap = 0xb0075;
constexpr std::uint64_t kTagFeatures = 0xfea7;

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const double> columns, std::size_t n_rows, std::size_t n_features, std::span<const int> y,
              std::size_t n_classes, const TrainConfig& cfg, std::uint64_t feature_key)
      : columns_(columns),
        n_rows_(n_rows),
        n_features_(n_features),
        y_(y),
        n_classes_(n_classes),
        cfg_(cfg),
        rng_(feature_key),
        perm_(n_features) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    mtry_ = cfg.features_per_split > 0
                ? std::min(cfg.features_per_split, n_features)
                : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(double(n_features)))));
  }

  DecisionTree build(std::vector<std::uint32_t> sample) {
    tree_ = DecisionTree{};
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  double value(std::size_t feature, std::uint32_t row) const { return columns_[feature * n_rows_ + row]; }

  int grow(std::vector<std::uint32_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].samples = idx.size();

    std::vector<double> counts(n_classes_, 0.0);
    for (auto r : idx) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;

    SplitChoice split;
    if (!pure && depth < cfg_.max_depth && idx.size() >= 2 * cfg_.min_leaf) split = best_split(idx, counts);

    if (split.feature < 0) {
      for (auto& c : counts) c /= static_cast<double>(idx.size());
      tree_.nodes[id].class_probs = std::move(counts);
      return id;
    }

    auto mid = std::partition(idx.begin(), idx.end(), [&](std::uint32_t r) {
      return value(static_cast<std::size_t>(split.feature), r) <= split.threshold;
    });
    std::vector<std::uint32_t> left(idx.begin(), mid);
    std::vector<std::uint32_t> right(mid, idx.end());
    idx.clear();
    idx.shrink_to_fit();

    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].impurity_decrease = split.decrease;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  SplitChoice best_split(const std::vector<std::uint32_t>& idx, const std::vector<double>& totals) {
    for (std::size_t i = 0; i < mtry_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(n_features_ - i));
      std::swap(perm_[i], perm_[j]);
    }
    std::vector<std::size_t> candidates(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::sort(candidates.begin(), candidates.end());

    const std::size_t m = idx.size();
    const double md = static_cast<double>(m);
    double parent = 0.0;
    for (double t : totals) parent += t * t;
    parent /= md;

    SplitChoice best;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> buf(m);
    std::vector<double> left(n_classes_);
    for (auto f : candidates) {
      for (std::size_t k = 0; k < m; ++k) buf[k] = {value(f, idx[k]), y_[idx[k]]};
      std::sort(buf.begin(), buf.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (buf.front().first == buf.back().first) continue;
      std::fill(left.begin(), left.end(), 0.0);
      for (std::size_t k = 1; k < m; ++k) {
        left[static_cast<std::size_t>(buf[k - 1].second)] += 1.0;
        if (buf[k - 1].first == buf[k].first) continue;
        if (k < cfg_.min_leaf || m - k < cfg_.min_leaf) continue;
        const double nl = static_cast<double>(k);
        const double nr = md - nl;
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < n_classes_; ++c) {
          sl += left[c] * left[c];
          const double rc = totals[c] - left[c];
          sr += rc * rc;
        }
        const double score = sl / nl + sr / nr;
        if (score > best_score) {
          best_score = score;
          const double a = buf[k - 1].first;
          const double b = buf[k].first;
          double thr = a + (b - a) / 2.0;
          if (!(thr < b)) thr = a;
          best.feature = static_cast<int>(f);
          best.threshold = thr;
        }
      }
    }
    if (best.feature >= 0) {
      best.decrease = best_score - parent;
      if (!(best.decrease > 1e-12 * md)) best.feature = -1;
    }
    return best;
  }

  std::span<const double> columns_;
  std::size_t n_rows_, n_features_;
  std::span<const int> y_;
  std::size_t n_classes_;
  const TrainConfig& cfg_;
  Rng rng_;
  std::vector<std::size_t> perm_;
  std::size_t mtry_ = 1;
  DecisionTree tree_;
};

nlohmann::json node_to_json(const DecisionTree& tree, int id, const std::vector<std::string>& names) {
  const auto& n = tree.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) return {{"leaf", n.class_probs}, {"samples", n.samples}};
  return {{"feature", n.feature},
          {"name", names[static_cast<std::size_t>(n.feature)]},
          {"threshold", n.threshold},
          {"samples", n.samples},
          {"gain", n.impurity_decrease},
          {"left", node_to_json(tree, n.left, names)},
          {"right", node_to_json(tree, n.right, names)}};
}

int node_from_json(const nlohmann::json& j, DecisionTree& tree, std::size_t n_features, std::size_t n_classes) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  node.samples = j.at("samples").get<std::size_t>();
  if (j.contains("leaf")) {
    node.class_probs = j.at("leaf").get<std::vector<double>>();
    if (node.class_probs.size() != n_classes) throw Error(ErrorKind::Format, "leaf class count mismatch");
    tree.nodes[static_cast<std::size_t>(id)] = std::move(node);
    return id;
  }
  node.feature = j.at("feature").get<int>();
  if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features)
    throw Error(ErrorKind::Format, "split feature index out of range");
  node.threshold = j.at("threshold").get<double>();
  node.impurity_decrease = j.at("gain").get<double>();
  node.left = node_from_json(j.at("left"), tree, n_features, n_classes);
  node.right = node_from_json(j.at("right"), tree, n_features, n_classes);
  tree.nodes[static_cast<std::size_t>(id)] = std::move(node);
  return id;
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"n_trees", c.n_trees},       {"max_depth", c.max_depth}, {"k_folds", c.k_folds},
          {"repeats", c.repeats},       {"rng_seed", c.rng_seed},   {"features_per_split", c.features_per_split},
          {"min_leaf", c.min_leaf}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.n_trees = j.at("n_trees").get<std::size_t>();
  c.max_depth = j.at("max_depth").get<std::size_t>();
  c.k_folds = j.at("k_folds").get<std::size_t>();
  c.repeats = j.at("repeats").get<std::size_t>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.features_per_split = j.at("features_per_split").get<std::size_t>();
  c.min_leaf = j.at("min_leaf").get<std::size_t>();
  return c;
}

}  // namespace

TrainConfig TrainConfig::experiment_one() {
  TrainConfig c;
  c.n_trees = 3;
  c.max_depth = 5;
  return c;
}

TrainConfig TrainConfig::experiment_two() {
  TrainConfig c;
  c.n_trees = 30;
  c.max_depth = 5;
  return c;
}

BinaryView binary_view(const LabeledEdgeSet& set, const std::vector<EdgeLabel>& positive,
                       const std::vector<EdgeLabel>& negative) {
  BinaryView view;
  for (std::size_t r = 0; r < set.labels.size(); ++r) {
    const auto l = set.labels[r];
    if (std::find(positive.begin(), positive.end(), l) != positive.end()) {
      view.source_rows.push_back(r);
      view.y.push_back(1);
    } else if (std::find(negative.begin(), negative.end(), l) != negative.end()) {
      view.source_rows.push_back(r);
      view.y.push_back(0);
    }
  }
  view.x = set.rows.select_rows(view.source_rows);
  return view;
}

std::size_t DecisionTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const auto& n = nodes[static_cast<std::size_t>(id)];
    best = std::max(best, d);
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

const std::vector<double>& DecisionTree::leaf_probs(std::span<const double> row) const {
  const TreeNode* n = &nodes.front();
  while (!n->is_leaf())
    n = &nodes[static_cast<std::size_t>(row[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
  return n->class_probs;
}

TrainResult train_forest(const FeatureMatrix& x, std::span<const int> y, const TrainConfig& cfg) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (y.size() != n) throw Error(ErrorKind::Argument, "label count does not match row count");
  if (x.names.size() != p) throw Error(ErrorKind::Schema, "feature names do not match matrix width");
  if (cfg.n_trees == 0 || cfg.max_depth == 0 || cfg.min_leaf == 0)
    throw Error(ErrorKind::Config, "n_trees, max_depth and min_leaf must be positive");
  if (n < 10) throw Error(ErrorKind::Training, "need at least 10 rows to train, got " + std::to_string(n));
  int max_label = -1;
  for (int v : y) {
    if (v < 0) throw Error(ErrorKind::Argument, "class ids must be non-negative");
    max_label = std::max(max_label, v);
  }
  const std::size_t n_classes = static_cast<std::size_t>(std::max(max_label + 1, 2));
  std::vector<std::size_t> class_counts(n_classes, 0);
  for (int v : y) ++class_counts[static_cast<std::size_t>(v)];
  if (std::count_if(class_counts.begin(), class_counts.end(), [](std::size_t c) { return c > 0; }) < 2)
    throw Error(ErrorKind::Training, "training data contains a single class");

  std::vector<double> columns(n * p);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < p; ++f) columns[f * n + r] = x.values(r, f);

  RandomForest forest;
  forest.feature_names = x.names;
  forest.schema_hash = x.schema_hash();
  forest.n_classes = n_classes;
  forest.config = cfg;
  forest.trees.resize(cfg.n_trees);

  parallel_for(cfg.n_trees, cfg.threads, [&](std::size_t t) {
    Rng boot(derive_seed(cfg.rng_seed, kTagBootstrap, t));
    std::vector<std::uint32_t> sample(n);
    std::vector<char> in_bag(n, 0);
    for (auto& s : sample) {
      s = static_cast<std::uint32_t>(boot.below(n));
      in_bag[s] = 1;
    }
    TreeBuilder builder(columns, n, p, y, n_classes, cfg, derive_seed(cfg.rng_seed, kTagFeatures, t));
    DecisionTree tree = builder.build(std::move(sample));
    for (std::size_t r = 0; r < n; ++r)
      if (!in_bag[r]) tree.oob_rows.push_back(r);
    forest.trees[t] = std::move(tree);
  });

  TrainResult result;
  result.oob.probability.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> votes(n, 0);
  for (const auto& tree : forest.trees)
    for (auto r : tree.oob_rows) {
      sum[r] += tree.leaf_probs(x.values.row(r))[1];
      ++votes[r];
    }
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (votes[r] == 0) continue;
    const double prob = sum[r] / static_cast<double>(votes[r]);
    result.oob.probability[r] = prob;
    ++result.oob.covered;
    if ((prob >= 0.5 ? 1 : 0) != (y[r] == 1 ? 1 : 0)) ++wrong;
  }
  result.oob.error = result.oob.covered ? static_cast<double>(wrong) / static_cast<double>(result.oob.covered) : 0.0;
  result.forest = std::move(forest);
  return result;
}

std::vector<double> predict_proba(const RandomForest& forest, std::span<const double> row) {
  if (row.size() != forest.feature_names.size())
    throw Error(ErrorKind::Schema, "row has " + std::to_string(row.size()) + " features, model expects " +
                                       std::to_string(forest.feature_names.size()));
  std::vector<double> acc(forest.n_classes, 0.0);
  for (const auto& tree : forest.trees) {
    const auto& probs = tree.leaf_probs(row);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += probs[c];
  }
  for (auto& a : acc) a /= static_cast<double>(forest.trees.size());
  return acc;
}

double predict(const RandomForest& forest, std::span<const double> row) { return predict_proba(forest, row)[1]; }

std::vector<double> predict(const RandomForest& forest, const FeatureMatrix& x, unsigned threads) {
  if (x.schema_hash() != forest.schema_hash)
    throw Error(ErrorKind::Schema, "feature schema " + to_hex(x.schema_hash()) + " does not match model schema " +
                                       to_hex(forest.schema_hash));
  std::vector<double> out(x.rows());
  parallel_for(x.rows(), threads, [&](std::size_t r) { out[r] = predict(forest, x.values.row(r)); });
  return out;
}

std::vector<Importance> variable_importance(const RandomForest& forest) {
  std::vector<double> total(forest.feature_names.size(), 0.0);
  for (const auto& tree : forest.trees)
    for (const auto& n : tree.nodes)
      if (!n.is_leaf()) total[static_cast<std::size_t>(n.feature)] += n.impurity_decrease;
  const double top = total.empty() ? 0.0 : *std::max_element(total.begin(), total.end());
  std::vector<Importance> out;
  out.reserve(total.size());
  for (std::size_t f = 0; f < total.size(); ++f)
    out.push_back(Importance{forest.feature_names[f], f, top > 0 ? total[f] / top : 0.0});
  std::stable_sort(out.begin(), out.end(), [](const Importance& a, const Importance& b) { return a.value > b.value; });
  return out;
}

std::string RandomForest::to_json() const {
  nlohmann::json doc;
  doc["format"] = "cict.forest";
  doc["version"] = kForestFormatVersion;
  doc["schema_hash"] = to_hex(schema_hash);
  doc["n_classes"] = n_classes;
  doc["config"] = config_to_json(config);
  doc["feature_names"] = feature_names;
  auto& trees_json = doc["trees"] = nlohmann::json::array();
  for (const auto& t : trees) trees_json.push_back({{"oob_rows", t.oob_rows}, {"root", node_to_json(t, 0, feature_names)}});
  return doc.dump();
}

RandomForest RandomForest::from_json(std::string_view text) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "cict.forest")
    throw Error(ErrorKind::Format, "not a cict.forest document");
  if (doc.value("version", 0) != kForestFormatVersion) throw Error(ErrorKind::Format, "unsupported forest version");
  try {
    RandomForest f;
    f.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    f.n_classes = doc.at("n_classes").get<std::size_t>();
    f.config = config_from_json(doc.at("config"));
    f.schema_hash = cict::schema_hash(f.feature_names);
    if (to_hex(f.schema_hash) != doc.at("schema_hash").get<std::string>())
      throw Error(ErrorKind::Format, "schema hash does not match feature names");
    for (const auto& t : doc.at("trees")) {
      DecisionTree tree;
      tree.oob_rows = t.at("oob_rows").get<std::vector<std::size_t>>();
      node_from_json(t.at("root"), tree, f.feature_names.size(), f.n_classes);
      f.trees.push_back(std::move(tree));
    }
    if (f.trees.empty()) throw Error(ErrorKind::Format, "forest has no trees");
    return f;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Format, std::string("malformed forest document: ") + ex.what());
  }
}

}  // namespace cict
