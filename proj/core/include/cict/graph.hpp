#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cict/ingest.hpp"

namespace cict {

using NodeId = std::uint32_t;

struct NodeStats {
  std::string code;
  std::size_t freq = 0;  // records bearing this code
  std::size_t out_total = 0;
  std::size_t in_total = 0;
  std::size_t out_degree = 0;
  std::size_t in_degree = 0;
};

struct EdgeStats {
  NodeId source = 0;
  NodeId target = 0;
  std::size_t count = 0;
  std::vector<std::int64_t> intervals;  // ascending; size() == count
};

/// Aggregated transition graph. Nodes are indexed in ascending code order and
/// edges in ascending (source, target) order, so adjacency lists come out
/// sorted by code. Immutable after construction.
class TransitionNetwork {
 public:
  TransitionNetwork() = default;

  /// Node frequencies come from `freq`; every transition endpoint must be present.
  static TransitionNetwork build(const std::vector<Transition>& ts,
                                 const std::map<std::string, std::size_t>& freq);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t total_transitions() const noexcept { return total_transitions_; }
  /// Sum of node frequencies (the normalizer for level-2 features).
  std::size_t total_frequency() const noexcept { return total_frequency_; }

  const std::vector<NodeStats>& nodes() const noexcept { return nodes_; }
  const std::vector<EdgeStats>& edges() const noexcept { return edges_; }
  const NodeStats& node(NodeId id) const { return nodes_.at(id); }
  const EdgeStats& edge(std::size_t index) const { return edges_.at(index); }

  std::optional<NodeId> find_node(std::string_view code) const;
  NodeId node_id(std::string_view code) const;  // throws Error{Lookup}

  std::optional<std::size_t> find_edge(NodeId source, NodeId target) const;
  std::size_t edge_index(NodeId source, NodeId target) const;  // throws Error{Lookup}

  /// Count of target -> source, 0 when absent.
  std::size_t reverse_count(NodeId source, NodeId target) const;
  std::size_t reverse_count(std::string_view source, std::string_view target) const;

  /// Edge indices of outgoing / incoming edges, ordered by the other endpoint's code.
  const std::vector<std::size_t>& out_edges(NodeId id) const { return out_.at(id); }
  const std::vector<std::size_t>& in_edges(NodeId id) const { return in_.at(id); }

  std::vector<std::pair<std::string, const EdgeStats*>> successors(std::string_view code) const;
  std::vector<std::pair<std::string, const EdgeStats*>> predecessors(std::string_view code) const;

  std::string to_json() const;
  static TransitionNetwork from_json(std::string_view text);

  bool operator==(const TransitionNetwork& other) const;

 private:
  void finalize();

  std::vector<NodeStats> nodes_;
  std::vector<EdgeStats> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::unordered_map<std::string, NodeId> index_;
  std::unordered_map<std::uint64_t, std::size_t> edge_lookup_;
  std::size_t total_transitions_ = 0;
  std::size_t total_frequency_ = 0;
};

/// Convenience: extract transitions and record frequencies from a dataset.
TransitionNetwork build_network(const std::vector<Transition>& ts, const SequenceDataset& freq_source);

}  // namespace cict
