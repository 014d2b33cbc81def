// cict — command-line front end for the transition-network causality toolkit.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "cict/csv.hpp"
#include "cict/error.hpp"
#include "cict/eval.hpp"
#include "cict/experiment.hpp"
#include "cict/features.hpp"
#include "cict/graph.hpp"
#include "cict/hash.hpp"
#include "cict/ingest.hpp"
#include "cict/model.hpp"
#include "cict/parallel.hpp"
#include "cict/report.hpp"
#include "cict/stats.hpp"
#include "cict/synth.hpp"

#ifndef CICT_VERSION
#define CICT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cict;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string digest(const fs::path& p) {
  Fnv1a h;
  h.update(slurp(p));
  return "fnv1a64:" + to_hex(h.value());
}

void write_text(const fs::path& p, const std::string& text) {
  auto out = csv::open_output(p);
  out << text;
}

/// Collects inputs, outputs and timings for one run and writes manifest.json.
class Run {
 public:
  Run(std::string command, fs::path out_dir, std::uint64_t seed)
      : command_(std::move(command)), dir_(std::move(out_dir)), seed_(seed), start_(clock::now()) {
    fs::create_directories(dir_);
  }

  void config(const std::string& key, json value) { config_[key] = std::move(value); }
  void input(const fs::path& p) { inputs_.push_back(p); }
  fs::path output(const std::string& name) {
    outputs_.push_back(dir_ / name);
    return dir_ / name;
  }
  void outputs(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) outputs_.push_back(p);
  }
  void lap(const std::string& stage) {
    const auto now = clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const fs::path& dir() const { return dir_; }

  void finish() {
    json m;
    m["command"] = command_;
    m["config"] = config_;
    m["seed"] = seed_;
    m["feature_schema"] = std::string(kFeatureSchemaVersion);
    m["tool_version"] = CICT_VERSION;
    json in = json::array(), out = json::array();
    for (const auto& p : inputs_) in.push_back({{"path", p.string()}, {"digest", digest(p)}});
    for (const auto& p : outputs_) out.push_back({{"path", p.filename().string()}, {"digest", digest(p)}});
    m["inputs"] = in;
    m["outputs"] = out;
    timings_["total"] = std::chrono::duration<double>(clock::now() - start_).count();
    m["timings_seconds"] = timings_;
    write_text(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string command_;
  fs::path dir_;
  std::uint64_t seed_;
  clock::time_point start_;
  clock::time_point last_ = clock::now();
  json config_ = json::object();
  std::vector<fs::path> inputs_, outputs_;
  std::map<std::string, double> timings_;
};

std::vector<EdgeLabel> parse_labels(const std::string& list) {
  std::vector<EdgeLabel> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_label(item));
  if (out.empty()) throw Error(ErrorKind::Config, "empty label list");
  return out;
}

// Rows of `fm` whose label is in positive (y=1) or negative (y=0).
struct Labeled {
  FeatureMatrix x;
  std::vector<int> y;
};

Labeled label_rows(const FeatureMatrix& fm, const LabelMap& labels, const std::vector<EdgeLabel>& pos,
                   const std::vector<EdgeLabel>& neg) {
  LabeledEdgeSet set{fm, {}};
  GroundTruth truth;
  truth.planted = labels;
  for (const auto& k : fm.keys) set.labels.push_back(truth.label(k.source, k.target));
  auto view = binary_view(set, pos, neg);
  return {std::move(view.x), std::move(view.y)};
}

std::map<std::string, std::size_t> read_frequencies(const fs::path& p) {
  const auto t = csv::read_table(p);
  const auto c = t.column("code");
  const auto f = t.column("freq");
  std::map<std::string, std::size_t> out;
  for (const auto& row : t.rows) {
    try {
      out[row[c]] = std::stoull(row[f]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format, "bad frequency for code '" + row[c] + "'");
    }
  }
  return out;
}

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--seed", c.seed, "Root random seed (default 0)");
  cmd->add_option("--threads", c.threads, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  Common common;
  std::string in, format = "csv";
  std::size_t min_edge_count = 1;
  std::optional<std::int64_t> max_interval;
};

void cmd_ingest(const IngestArgs& a) {
  Run run("ingest", a.common.out, a.common.seed);
  run.input(a.in);
  run.config("format", a.format);
  run.config("min_edge_count", a.min_edge_count);
  if (a.max_interval) run.config("max_interval", *a.max_interval);
  const auto ds = load_events(a.in, parse_format(a.format));
  auto ts = extract_transitions(ds);
  if (a.max_interval) ts = filter_by_max_interval(ts, *a.max_interval);
  if (a.min_edge_count > 1) ts = filter_by_edge_count(ts, a.min_edge_count);
  run.lap("ingest");
  {
    auto out = csv::open_output(run.output("transitions.csv"));
    write_transitions_csv(out, ts);
  }
  const auto freq = ds.code_frequencies();
  {
    auto out = csv::open_output(run.output("frequencies.csv"));
    out << "code,freq\n";
    for (const auto& [code, n] : freq) csv::write_row(out, {code, std::to_string(n)});
  }
  json s;
  s["entities"] = ds.entities.size();
  s["records"] = ds.record_count;
  s["transitions"] = ts.size();
  s["distinct_codes"] = freq.size();
  s["malformed_lines"] = ds.malformed_count;
  write_text(run.output("summary.json"), s.dump(2) + "\n");
  std::cout << s.dump(2) << "\n";
  run.finish();
}

struct BuildArgs {
  Common common;
  std::string transitions, frequencies;
};

void cmd_build(const BuildArgs& a) {
  Run run("build", a.common.out, a.common.seed);
  run.input(a.transitions);
  run.input(a.frequencies);
  const auto net = TransitionNetwork::build(read_transitions_csv(a.transitions), read_frequencies(a.frequencies));
  write_text(run.output("network.json"), net.to_json() + "\n");
  std::cout << "nodes " << net.node_count() << ", edges " << net.edge_count() << ", transitions "
            << net.total_transitions() << "\n";
  run.finish();
}

TransitionNetwork load_network(const fs::path& p) { return TransitionNetwork::from_json(slurp(p)); }

struct FeaturizeArgs {
  Common common;
  std::string network, edges;
  std::size_t min_count = 1;
};

void cmd_featurize(const FeaturizeArgs& a) {
  Run run("featurize", a.common.out, a.common.seed);
  run.input(a.network);
  run.config("min_count", a.min_count);
  const auto net = load_network(a.network);
  FeatureMatrix fm;
  if (!a.edges.empty()) {
    run.input(a.edges);
    const auto t = csv::read_table(a.edges);
    const auto s = t.column("source");
    const auto g = t.column("target");
    std::vector<EdgeKey> keys;
    for (const auto& row : t.rows) keys.push_back({row[s], row[g]});
    fm = featurize_edges(net, keys, a.common.threads);
  } else {
    fm = featurize_all(net, EdgeFilter{a.min_count}, a.common.threads);
  }
  run.lap("featurize");
  auto out = csv::open_output(run.output("features.csv"));
  write_feature_csv(out, fm);
  out.close();
  std::cout << fm.rows() << " edges x " << fm.cols() << " features\n";
  run.finish();
}

struct TrainArgs {
  Common common;
  std::string features, labels, positive = "causal", negative = "random";
  std::size_t trees = 3, depth = 5, folds = 10, repeats = 0, mtry = 0;
};

void cmd_train(const TrainArgs& a) {
  Run run("train", a.common.out, a.common.seed);
  run.input(a.features);
  run.input(a.labels);
  run.config("positive", a.positive);
  run.config("negative", a.negative);
  run.config("trees", a.trees);
  run.config("depth", a.depth);
  run.config("folds", a.folds);
  run.config("cv_repeats", a.repeats);
  TrainConfig cfg;
  cfg.n_trees = a.trees;
  cfg.max_depth = a.depth;
  cfg.k_folds = a.folds;
  cfg.repeats = a.repeats;
  cfg.features_per_split = a.mtry;
  cfg.rng_seed = a.common.seed;
  cfg.threads = a.common.threads;
  const auto data =
      label_rows(read_feature_csv(a.features), read_label_csv(a.labels), parse_labels(a.positive), parse_labels(a.negative));
  const auto result = train_forest(data.x, data.y, cfg);
  run.lap("train");
  write_text(run.output("model.json"), result.forest.to_json() + "\n");
  {
    auto out = csv::open_output(run.output("oob.csv"));
    out << "source,target,label,oob_probability\n";
    for (std::size_t r = 0; r < data.x.rows(); ++r) {
      const double p = result.oob.probability[r];
      csv::write_row(out, {data.x.keys[r].source, data.x.keys[r].target, std::to_string(data.y[r]),
                           std::isnan(p) ? std::string() : csv::format_double(p)});
    }
  }
  json summary{{"rows", data.x.rows()}, {"oob_error", result.oob.error}, {"oob_covered", result.oob.covered}};
  if (a.repeats > 0) {
    const auto cv = summarize_cv(cross_validate(data.x, data.y, cfg), a.folds);
    run.lap("cross_validate");
    summary["cv_auc_mean"] = cv.auc.mean;
    summary["cv_auc_sd"] = cv.auc.sd;
    summary["cv_mse_mean"] = cv.mse.mean;
    summary["cv_r2_mean"] = cv.r2.mean;
    summary["oob_auc_mean"] = cv.oob_auc.mean;
  }
  write_text(run.output("train_summary.json"), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  run.finish();
}

struct PredictArgs {
  Common common;
  std::string model, features;
};

void cmd_predict(const PredictArgs& a) {
  Run run("predict", a.common.out, a.common.seed);
  run.input(a.model);
  run.input(a.features);
  const auto forest = RandomForest::from_json(slurp(a.model));
  const auto fm = read_feature_csv(a.features);
  const auto scores = predict(forest, fm, a.common.threads);
  auto out = csv::open_output(run.output("predictions.csv"));
  out << "source,target,score\n";
  for (std::size_t r = 0; r < fm.rows(); ++r)
    csv::write_row(out, {fm.keys[r].source, fm.keys[r].target, csv::format_double(scores[r])});
  out.close();
  run.finish();
}

struct EvaluateArgs {
  Common common;
  std::string predictions, labels, positive = "causal", negative = "random";
  std::size_t bins = 10;
};

void cmd_evaluate(const EvaluateArgs& a) {
  Run run("evaluate", a.common.out, a.common.seed);
  run.input(a.predictions);
  run.input(a.labels);
  const auto labels = read_label_csv(a.labels);
  const auto pos = parse_labels(a.positive), neg = parse_labels(a.negative);
  GroundTruth truth;
  truth.planted = labels;
  const auto t = csv::read_table(a.predictions);
  const auto s = t.column("source"), g = t.column("target"), sc = t.column("score");
  std::vector<double> scores;
  std::vector<int> y;
  for (const auto& row : t.rows) {
    const auto l = truth.label(row[s], row[g]);
    const bool is_pos = std::find(pos.begin(), pos.end(), l) != pos.end();
    const bool is_neg = std::find(neg.begin(), neg.end(), l) != neg.end();
    if (!is_pos && !is_neg) continue;
    scores.push_back(std::stod(row[sc]));
    y.push_back(is_pos ? 1 : 0);
  }
  auto report = assemble_report(std::nullopt, scores, y);
  report.hosmer_lemeshow = eval::hosmer_lemeshow(scores, y, a.bins);
  report.info["predictions"] = fs::path(a.predictions).filename().string();
  write_text(run.output("report.json"), report.to_json() + "\n");
  write_plot_series(run.dir(), report);
  run.outputs({run.dir() / "roc.csv", run.dir() / "calibration.csv", run.dir() / "score_dist.csv"});
  std::cout << "auc " << report.auc << ", hl p " << report.hosmer_lemeshow.p_value << ", youden "
            << report.youden.threshold << "\n";
  run.finish();
}

struct ClusterArgs {
  Common common;
  std::string features, labels, positive = "causal", negative = "random";
  std::size_t k = 2;
};

void cmd_cluster(const ClusterArgs& a) {
  Run run("cluster", a.common.out, a.common.seed);
  run.input(a.features);
  run.config("k", a.k);
  auto fm = read_feature_csv(a.features);
  std::vector<int> y;
  if (!a.labels.empty()) {
    run.input(a.labels);
    auto data = label_rows(fm, read_label_csv(a.labels), parse_labels(a.positive), parse_labels(a.negative));
    fm = std::move(data.x);
    y = std::move(data.y);
  }
  const auto c = cluster_edges(fm.values, y, a.k);
  write_cluster_series(run.output("clusters.csv"), c, &fm.keys);
  json s{{"k", a.k}, {"rows", fm.rows()}, {"explained_ratio", c.explained}};
  if (!y.empty()) s["ari"] = c.ari;
  write_text(run.output("cluster.json"), s.dump(2) + "\n");
  std::cout << s.dump(2) << "\n";
  run.finish();
}

// Bin edges in log space; features with non-positive values use sign(x)*log1p(|x|).
std::vector<double> log_bins(double lo, double hi, std::size_t n) {
  const bool positive = lo > 0;
  auto fwd = [&](double x) { return positive ? std::log(x) : std::copysign(std::log1p(std::abs(x)), x); };
  auto inv = [&](double u) { return positive ? std::exp(u) : std::copysign(std::expm1(std::abs(u)), u); };
  const double a = fwd(lo), b = fwd(hi);
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = inv(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

struct ImportanceArgs {
  Common common;
  std::string model, features, labels, positive = "causal", negative = "random";
  std::size_t bins = 20, top = 20;
};

void cmd_importance(const ImportanceArgs& a) {
  Run run("importance", a.common.out, a.common.seed);
  run.input(a.model);
  const auto forest = RandomForest::from_json(slurp(a.model));
  const auto imp = variable_importance(forest);
  {
    auto out = csv::open_output(run.output("importance.csv"));
    out << "rank,feature,importance\n";
    std::size_t rank = 1;
    for (const auto& i : imp) csv::write_row(out, {std::to_string(rank++), i.feature, csv::format_double(i.value)});
  }
  if (!a.features.empty() && !a.labels.empty()) {
    run.input(a.features);
    run.input(a.labels);
    const auto data = label_rows(read_feature_csv(a.features), read_label_csv(a.labels), parse_labels(a.positive),
                                 parse_labels(a.negative));
    auto hist = csv::open_output(run.output("histograms.csv"));
    auto ks = csv::open_output(run.output("ks.csv"));
    hist << "feature,bin,lower,upper,class,count\n";
    ks << "feature,importance,ks_statistic,p_value\n";
    for (std::size_t t = 0; t < std::min(a.top, imp.size()); ++t) {
      const auto col = data.x.column(imp[t].feature);
      std::vector<double> pos, neg;
      for (std::size_t r = 0; r < data.x.rows(); ++r) (data.y[r] ? pos : neg).push_back(data.x.values(r, col));
      if (!pos.empty() && !neg.empty()) {
        const auto res = stats::ks_two_sample(pos, neg);
        csv::write_row(ks, {imp[t].feature, csv::format_double(imp[t].value), csv::format_double(res.statistic),
                            csv::format_double(res.p_value)});
      }
      double lo = INFINITY, hi = -INFINITY;
      for (double v : pos) lo = std::min(lo, v), hi = std::max(hi, v);
      for (double v : neg) lo = std::min(lo, v), hi = std::max(hi, v);
      if (!(lo <= hi)) continue;
      const auto edges = lo == hi ? std::vector<double>{lo, hi} : log_bins(lo, hi, a.bins);
      const std::size_t nb = edges.size() - 1;
      for (int cls : {0, 1}) {
        std::vector<std::size_t> count(nb, 0);
        for (double v : cls ? pos : neg) {
          const auto it = std::upper_bound(edges.begin(), edges.end(), v);
          const auto b = std::min<std::size_t>(nb - 1, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - edges.begin() - 1)));
          ++count[b];
        }
        for (std::size_t b = 0; b < nb; ++b)
          csv::write_row(hist, {imp[t].feature, std::to_string(b), csv::format_double(edges[b]),
                                csv::format_double(edges[b + 1]), cls ? "positive" : "negative",
                                std::to_string(count[b])});
      }
    }
  }
  std::cout << "top feature " << (imp.empty() ? "-" : imp.front().feature) << "\n";
  run.finish();
}

struct SynthArgs {
  Common common;
  std::string spec;
  bool seed_given = false;
};

PlantedNetworkSpec load_spec(const std::string& spec, std::optional<std::uint64_t> seed) {
  if (spec == "desk") return PlantedNetworkSpec::desk_world(seed.value_or(0));
  auto s = PlantedNetworkSpec::load(spec);
  if (seed) s.rng_seed = *seed;
  return s;
}

void cmd_synth(const SynthArgs& a) {
  Run run("synth", a.common.out, a.common.seed);
  if (a.spec != "desk") run.input(a.spec);
  run.config("spec", a.spec);
  const auto spec = load_spec(a.spec, a.seed_given ? std::optional(a.common.seed) : std::nullopt);
  const auto out = generate(spec, a.common.threads);
  run.lap("generate");
  {
    auto f = csv::open_output(run.output("events.csv"));
    write_events_csv(f, out.dataset);
  }
  {
    auto f = csv::open_output(run.output("truth.csv"));
    write_label_csv(f, out.truth.planted);
  }
  {
    auto f = csv::open_output(run.output("roles.csv"));
    f << "code,role\n";
    for (std::size_t i = 0; i < out.truth.codes.size(); ++i) {
      const auto r = out.truth.roles[i];
      csv::write_row(f, {out.truth.codes[i], r == NodeRole::Cause ? "cause" : r == NodeRole::Effect ? "effect" : "random"});
    }
  }
  std::cout << out.dataset.entities.size() << " entities, " << out.dataset.record_count << " records, "
            << spec.causal_pairs.size() << " planted pairs\n";
  run.finish();
}

struct ExperimentArgs {
  Common common;
  std::string preset = "exp1", spec, events, format = "csv", labels, grouping, config;
  std::size_t groups = 0;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> repeats;
};

void apply_config_file(const fs::path& path, ExperimentConfig& cfg) {
  toml::table t;
  try {
    t = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::Config, "invalid TOML in " + path.string() + ": " + std::string(e.description()));
  }
  auto size = [&](const char* key, std::size_t& dst) {
    if (auto v = t[key].value<std::int64_t>()) {
      if (*v < 0) throw Error(ErrorKind::Config, std::string(key) + " must be non-negative");
      dst = static_cast<std::size_t>(*v);
    }
  };
  size("split_repeats", cfg.split_repeats);
  size("trees", cfg.train.n_trees);
  size("depth", cfg.train.max_depth);
  size("folds", cfg.train.k_folds);
  size("cv_repeats", cfg.train.repeats);
  size("min_edge_count", cfg.min_edge_count);
  size("fresh_sample", cfg.fresh_sample);
  size("cluster_k", cfg.cluster_k);
  if (auto v = t["train_fraction"].value<double>()) cfg.train_fraction = *v;
  if (auto arr = t["sizes"].as_array()) {
    cfg.sizes.clear();
    for (const auto& e : *arr) {
      const auto v = e.value<std::int64_t>();
      if (!v || *v < 0) throw Error(ErrorKind::Config, "sizes must be non-negative integers");
      cfg.sizes.push_back(static_cast<std::size_t>(*v));
    }
  }
}

void cmd_experiment(const ExperimentArgs& a) {
  const Preset preset = parse_preset(a.preset);
  std::vector<std::string> missing;
  if (a.spec.empty() && (a.events.empty() || a.labels.empty())) missing.push_back("--spec, or --events with --labels");
  if (preset == Preset::Exp4 && a.grouping.empty() && a.groups == 0) missing.push_back("--grouping or --groups");
  if (!missing.empty()) {
    std::string msg = "preset " + a.preset + " is missing inputs:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw Error(ErrorKind::Config, msg);
  }

  Run run("experiment", a.common.out, a.common.seed);
  ExperimentConfig cfg = ExperimentConfig::preset_config(preset);
  cfg.seed = a.common.seed;
  cfg.threads = a.common.threads;
  if (!a.config.empty()) {
    run.input(a.config);
    apply_config_file(a.config, cfg);
  }
  if (!a.sizes.empty()) cfg.sizes = a.sizes;
  if (a.repeats) cfg.split_repeats = *a.repeats;
  run.config("preset", a.preset);
  run.config("split_repeats", cfg.split_repeats);
  run.config("train_fraction", cfg.train_fraction);
  run.config("trees", cfg.train.n_trees);
  run.config("depth", cfg.train.max_depth);
  run.config("sizes", cfg.sizes);

  SequenceDataset ds;
  LabelMap labels;
  if (!a.spec.empty()) {
    if (a.spec != "desk") run.input(a.spec);
    run.config("spec", a.spec);
    auto out = generate(load_spec(a.spec, std::nullopt), cfg.threads);
    ds = std::move(out.dataset);
    labels = std::move(out.truth.planted);
  } else {
    run.input(a.events);
    run.input(a.labels);
    ds = load_events(a.events, parse_format(a.format));
    labels = read_label_csv(a.labels);
  }
  if (preset == Preset::Exp4) {
    Grouping g;
    if (!a.grouping.empty()) {
      run.input(a.grouping);
      g = read_grouping_csv(a.grouping);
    } else {
      std::vector<std::string> codes;
      for (const auto& [code, n] : ds.code_frequencies()) codes.push_back(code);
      g = round_robin_grouping(codes, a.groups);
      run.config("groups", a.groups);
    }
    ds = apply_grouping(ds, g);
    labels = group_labels(labels, g);
  }
  const auto net = build_network(extract_transitions(ds), ds);
  run.lap("network");
  const auto result = run_experiment(net, labels, cfg);
  run.lap("experiment");
  run.outputs(write_experiment(run.dir(), result));
  for (const char* key : {"heldout_auc_mean", "hl_pass_count", "ari", "retained", "retained_precision"}) {
    const auto it = result.report.metrics.find(key);
    if (it != result.report.metrics.end()) std::cout << key << " " << it->second << "\n";
  }
  run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cict: composition-of-transitions causal edge classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CICT_VERSION);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Event records -> transitions, frequencies and summary");
  add_common(c_ingest, ingest.common);
  c_ingest->add_option("--in", ingest.in, "Event file")->required();
  c_ingest->add_option("--format", ingest.format, "csv | jsonl");
  c_ingest->add_option("--min-edge-count", ingest.min_edge_count, "Drop transitions of rarer edges");
  c_ingest->add_option("--max-interval", ingest.max_interval, "Drop transitions with longer intervals");

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Transitions + frequencies -> network.json");
  add_common(c_build, build.common);
  c_build->add_option("--transitions", build.transitions)->required();
  c_build->add_option("--frequencies", build.frequencies)->required();

  FeaturizeArgs feat;
  auto* c_feat = app.add_subcommand("featurize", "network.json -> features.csv");
  add_common(c_feat, feat.common);
  c_feat->add_option("--network", feat.network)->required();
  c_feat->add_option("--edges", feat.edges, "Optional source,target CSV of edges to featurize");
  c_feat->add_option("--min-count", feat.min_count, "Minimum edge count (all-edges mode)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Fit a random forest on labeled feature rows");
  add_common(c_train, train.common);
  c_train->add_option("--features", train.features)->required();
  c_train->add_option("--labels", train.labels)->required();
  c_train->add_option("--positive", train.positive, "Comma-separated positive labels");
  c_train->add_option("--negative", train.negative, "Comma-separated negative labels");
  c_train->add_option("--trees", train.trees);
  c_train->add_option("--depth", train.depth);
  c_train->add_option("--folds", train.folds);
  c_train->add_option("--cv-repeats", train.repeats, "Repeated k-fold CV rounds (0 = skip)");
  c_train->add_option("--mtry", train.mtry, "Features tried per split (0 = sqrt)");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Score feature rows with a model");
  add_common(c_pred, pred.common);
  c_pred->add_option("--model", pred.model)->required();
  c_pred->add_option("--features", pred.features)->required();

  EvaluateArgs evalu;
  auto* c_eval = app.add_subcommand("evaluate", "AUC, calibration and Youden threshold of predictions");
  add_common(c_eval, evalu.common);
  c_eval->add_option("--predictions", evalu.predictions)->required();
  c_eval->add_option("--labels", evalu.labels)->required();
  c_eval->add_option("--positive", evalu.positive);
  c_eval->add_option("--negative", evalu.negative);
  c_eval->add_option("--bins", evalu.bins, "Hosmer-Lemeshow groups");

  ClusterArgs clus;
  auto* c_clus = app.add_subcommand("cluster", "PAM clustering of feature rows");
  add_common(c_clus, clus.common);
  c_clus->add_option("--features", clus.features)->required();
  c_clus->add_option("--labels", clus.labels, "Restrict to labeled rows and report ARI");
  c_clus->add_option("--positive", clus.positive);
  c_clus->add_option("--negative", clus.negative);
  c_clus->add_option("--k", clus.k);

  ImportanceArgs imp;
  auto* c_imp = app.add_subcommand("importance", "Ranked variable importance, histograms and KS tests");
  add_common(c_imp, imp.common);
  c_imp->add_option("--model", imp.model)->required();
  c_imp->add_option("--features", imp.features, "Feature rows for histograms");
  c_imp->add_option("--labels", imp.labels, "Labels for histograms");
  c_imp->add_option("--positive", imp.positive);
  c_imp->add_option("--negative", imp.negative);
  c_imp->add_option("--bins", imp.bins);
  c_imp->add_option("--top", imp.top, "Features with histograms");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a planted-causality dataset");
  add_common(c_syn, syn.common);
  c_syn->add_option("--spec", syn.spec, "TOML/JSON spec, or 'desk' for the built-in world")->required();

  ExperimentArgs exp;
  auto* c_exp = app.add_subcommand("experiment", "Run an experiment preset end to end");
  add_common(c_exp, exp.common);
  c_exp->add_option("--preset", exp.preset, "exp1 | exp2 | exp3 | exp4");
  c_exp->add_option("--spec", exp.spec, "Synthetic spec file or 'desk'");
  c_exp->add_option("--events", exp.events, "Event file (with --labels)");
  c_exp->add_option("--format", exp.format, "Event file format");
  c_exp->add_option("--labels", exp.labels, "source,target,label CSV");
  c_exp->add_option("--grouping", exp.grouping, "code,group CSV (exp4)");
  c_exp->add_option("--groups", exp.groups, "Round-robin grouping into N groups (exp4)");
  c_exp->add_option("--config", exp.config, "TOML overrides");
  c_exp->add_option("--sizes", exp.sizes, "Class sample sizes");
  c_exp->add_option("--repeats", exp.repeats, "Train/test split repeats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*c_ingest) cmd_ingest(ingest);
    else if (*c_build) cmd_build(build);
    else if (*c_feat) cmd_featurize(feat);
    else if (*c_train) cmd_train(train);
    else if (*c_pred) cmd_predict(pred);
    else if (*c_eval) cmd_evaluate(evalu);
    else if (*c_clus) cmd_cluster(clus);
    else if (*c_imp) cmd_importance(imp);
    else if (*c_syn) {
      syn.seed_given = c_syn->count("--seed") > 0;
      cmd_synth(syn);
    } else if (*c_exp) cmd_experiment(exp);
  } catch (const Error& e) {
    std::cerr << "cict: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "cict: io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cict: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
