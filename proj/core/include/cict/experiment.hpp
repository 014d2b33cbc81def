#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cict/graph.hpp"
#include "cict/ingest.hpp"
#include "cict/labels.hpp"
#include "cict/model.hpp"
#include "cict/report.hpp"
#include "cict/synth.hpp"

namespace cict {

enum class Preset { Exp1, Exp2, Exp3, Exp4 };

Preset parse_preset(const std::string& name);  // exp1 | exp2 | exp3 | exp4
std::string_view to_string(Preset p) noexcept;

struct ExperimentConfig {
  Preset preset = Preset::Exp1;
  SetMode mode = SetMode::RandomVsCausal;
  std::vector<std::size_t> sizes;  // empty: balanced, as large as the data allows (Exp4 caps at 161)
  double train_fraction = 0.75;
  std::size_t split_repeats = 50;  // independent train/test splits of one edge sample
  TrainConfig train;               // forest shape; k_folds x repeats of CV on the first training split
  TrainConfig direction;           // Exp3: direction model used for the second threshold
  std::size_t min_edge_count = 1;  // candidate filter for sampling
  std::size_t fresh_sample = 1600; // Exp3
  std::size_t cluster_k = 2;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  static ExperimentConfig preset_config(Preset p);
};

struct RetainedEdge {
  EdgeKey key;
  double measure = 0;    // mixed-model probability
  double direction = 0;  // direction-model probability
  EdgeLabel truth = EdgeLabel::Random;
};

struct ExperimentResult {
  EvaluationReport report;
  RandomForest model;               // trained on the first training split
  std::vector<LabeledKey> sample;   // labeled edges in feature-row order
  FeatureMatrix features;           // rows of `sample`
  std::vector<Importance> importance;
  std::vector<double> heldout_auc;  // per split repeat
  std::vector<double> hl_p;         // per split repeat
  std::vector<RetainedEdge> retained;  // Exp3, measure descending
};

/// Labeled candidates: every non-self edge with count >= min_count, labeled
/// from `labels` (absent pairs are random).
std::vector<std::pair<EdgeKey, EdgeLabel>> labeled_candidates(const TransitionNetwork& net, const LabelMap& labels,
                                                              std::size_t min_count = 1);

ExperimentResult run_experiment(const TransitionNetwork& net, const LabelMap& labels, const ExperimentConfig& cfg);

/// report.json, model.json, features.csv, importance.csv, roc/calibration/score_dist/clusters CSVs
/// and, for Exp3, retained.csv. Returns the written paths.
std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir, const ExperimentResult& r);

// Code grouping (coarser node vocabularies).
using Grouping = std::map<std::string, std::string>;

/// `code,group` CSV.
Grouping read_grouping_csv(const std::filesystem::path& path);
/// Evenly assigns the given codes to `groups` groups named G00, G01, ...
Grouping round_robin_grouping(const std::vector<std::string>& codes, std::size_t groups);
/// Renames every record's code; throws Error{Consistency} for unmapped codes.
SequenceDataset apply_grouping(const SequenceDataset& ds, const Grouping& g);
/// A group pair is causal if any member pair is, else reverse_causal if any is.
LabelMap group_labels(const LabelMap& labels, const Grouping& g);

}  // namespace cict
