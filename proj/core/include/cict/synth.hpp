#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cict/graph.hpp"
#include "cict/ingest.hpp"
#include "cict/labels.hpp"

namespace cict {

enum class NodeRole { Cause, Effect, Random };

struct PlantedPair {
  std::size_t cause = 0;
  std::size_t effect = 0;
  double strength = 0;  // probability that the step after `cause` lands on `effect`
};

/// Planted-causality world. Nodes [0, causes) are causes, the next `effects`
/// nodes are effects and the remainder are random nodes.
struct PlantedNetworkSpec {
  std::size_t n_nodes = 200;
  std::size_t n_entities = 20000;
  double mean_sequence_length = 5.0;  // >= 2
  std::vector<PlantedPair> causal_pairs;
  double random_background_rate = 0.0;  // chance a step ignores planted structure
  double leak_fraction = 0.1;           // effect -> cause leak = strength * leak_fraction (< 0.2)
  std::size_t causes = 40;
  std::size_t effects = 80;
  std::int64_t causal_interval_min = 1, causal_interval_max = 1700;
  std::int64_t random_interval_min = 10, random_interval_max = 400;
  std::uint64_t rng_seed = 0;

  std::size_t random_nodes() const noexcept { return n_nodes - causes - effects; }
  NodeRole role(std::size_t node) const noexcept;
  std::string code(std::size_t node) const;

  /// Throws Error{Spec} when roles, pairs or strengths are infeasible.
  void validate() const;

  /// Each cause gets `effects_per_cause` distinct effects; its total planted
  /// strength is uniform in [strength_min, strength_max] and split across them.
  void plant_causes(std::size_t effects_per_cause, double strength_min, double strength_max, std::uint64_t seed);

  /// 200 nodes (40 causes, 80 effects), 20,000 entities, each cause planted on
  /// 10 effects with total strength in [0.3, 0.7].
  static PlantedNetworkSpec desk_world(std::uint64_t seed = 0);

  /// TOML (.toml) or JSON (anything else) document.
  static PlantedNetworkSpec load(const std::filesystem::path& path);
  static PlantedNetworkSpec parse_json(const std::string& text);
};

struct GroundTruth {
  std::vector<std::string> codes;
  std::vector<NodeRole> roles;
  LabelMap planted;  // causal and reverse_causal pairs only

  /// causal / reverse_causal for planted pairs, none for self pairs, random otherwise.
  EdgeLabel label(const std::string& source, const std::string& target) const;
};

struct SynthOutput {
  SequenceDataset dataset;
  GroundTruth truth;
};

/// Markov walks over the planted world; identical for any thread count.
SynthOutput generate(const PlantedNetworkSpec& spec, unsigned threads = 1);

/// Label of every network edge, aligned with net.edges().
std::vector<EdgeLabel> label_edges(const GroundTruth& truth, const TransitionNetwork& net);
std::vector<EdgeLabel> label_edges(const LabelMap& labels, const TransitionNetwork& net);

enum class SetMode { RandomVsCausal, Direction, Mixed };

SetMode parse_set_mode(const std::string& name);

struct LabeledKey {
  EdgeKey key;
  EdgeLabel label = EdgeLabel::Random;
  int group = 0;  // an edge and its sampled reverse share a group
};

struct ExperimentSets {
  std::vector<LabeledKey> train;
  std::vector<LabeledKey> test;
};

/// Class-balanced sampling without replacement. Sizes: {causal, random} for
/// RandomVsCausal, {pairs, pairs} for Direction (each causal edge drawn with its
/// observed reverse), {causal, reverse, random} for Mixed. An edge and its
/// reverse share a group id when both are drawn. Sorted by key.
std::vector<LabeledKey> sample_edges(const std::vector<std::pair<EdgeKey, EdgeLabel>>& candidates, SetMode mode,
                                     const std::vector<std::size_t>& sizes, std::uint64_t seed);

/// Stratified split by group: train_fraction of each label-composition stratum
/// (rounded to nearest) goes to train.
ExperimentSets split_edges(const std::vector<LabeledKey>& sample, double train_fraction, std::uint64_t seed);

/// sample_edges followed by split_edges.
ExperimentSets make_experiment_sets(const std::vector<std::pair<EdgeKey, EdgeLabel>>& candidates, SetMode mode,
                                    const std::vector<std::size_t>& sizes, double train_fraction, std::uint64_t seed);

}  // namespace cict
