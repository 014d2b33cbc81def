#include "cict/graph.hpp"

#include <algorithm>

#include <json.hpp>

#include "cict/error.hpp"

namespace cict {
namespace {

constexpr int kNetworkFormatVersion = 1;

std::uint64_t edge_key(NodeId s, NodeId t) noexcept {
  return (static_cast<std::uint64_t>(s) << 32) | t;
}

}  // namespace

TransitionNetwork TransitionNetwork::build(const std::vector<Transition>& ts,
                                           const std::map<std::string, std::size_t>& freq) {
  TransitionNetwork net;
  net.nodes_.reserve(freq.size());
  for (const auto& [code, f] : freq) {
    net.index_.emplace(code, static_cast<NodeId>(net.nodes_.size()));
    net.nodes_.push_back(NodeStats{code, f});
  }

  auto lookup = [&](const std::string& code) {
    auto it = net.index_.find(code);
    if (it == net.index_.end())
      throw Error(ErrorKind::Consistency, "transition endpoint '" + code + "' has no event records");
    return it->second;
  };

  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> grouped;
  for (const auto& t : ts) grouped[edge_key(lookup(t.source), lookup(t.target))].push_back(t.interval);

  std::vector<std::uint64_t> keys;
  keys.reserve(grouped.size());
  for (const auto& [k, _] : grouped) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  net.edges_.reserve(keys.size());
  for (auto k : keys) {
    auto& intervals = grouped[k];
    std::sort(intervals.begin(), intervals.end());
    EdgeStats e;
    e.source = static_cast<NodeId>(k >> 32);
    e.target = static_cast<NodeId>(k & 0xffffffffu);
    e.count = intervals.size();
    e.intervals = std::move(intervals);
    net.edges_.push_back(std::move(e));
  }
  net.finalize();
  return net;
}

void TransitionNetwork::finalize() {
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  edge_lookup_.clear();
  total_transitions_ = 0;
  total_frequency_ = 0;
  for (auto& n : nodes_) {
    n.out_total = n.in_total = n.out_degree = n.in_degree = 0;
    total_frequency_ += n.freq;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    edge_lookup_.emplace(edge_key(e.source, e.target), i);
    out_[e.source].push_back(i);
    in_[e.target].push_back(i);
    nodes_[e.source].out_total += e.count;
    nodes_[e.source].out_degree += 1;
    nodes_[e.target].in_total += e.count;
    nodes_[e.target].in_degree += 1;
    total_transitions_ += e.count;
  }
  // Edges are sorted by (source, target), so out_ is already target-ordered;
  // in_ needs ordering by source.
  for (auto& list : in_)
    std::sort(list.begin(), list.end(),
              [&](std::size_t a, std::size_t b) { return edges_[a].source < edges_[b].source; });
}

std::optional<NodeId> TransitionNetwork::find_node(std::string_view code) const {
  auto it = index_.find(std::string(code));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId TransitionNetwork::node_id(std::string_view code) const {
  auto id = find_node(code);
  if (!id) throw Error(ErrorKind::Lookup, "unknown node '" + std::string(code) + "'");
  return *id;
}

std::optional<std::size_t> TransitionNetwork::find_edge(NodeId source, NodeId target) const {
  auto it = edge_lookup_.find(edge_key(source, target));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t TransitionNetwork::edge_index(NodeId source, NodeId target) const {
  auto e = find_edge(source, target);
  if (!e)
    throw Error(ErrorKind::Lookup, "no edge " + nodes_.at(source).code + " -> " + nodes_.at(target).code);
  return *e;
}

std::size_t TransitionNetwork::reverse_count(NodeId source, NodeId target) const {
  auto e = find_edge(target, source);
  return e ? edges_[*e].count : 0;
}

std::size_t TransitionNetwork::reverse_count(std::string_view source, std::string_view target) const {
  auto s = find_node(source);
  auto t = find_node(target);
  if (!s || !t) return 0;
  return reverse_count(*s, *t);
}

std::vector<std::pair<std::string, const EdgeStats*>> TransitionNetwork::successors(std::string_view code) const {
  std::vector<std::pair<std::string, const EdgeStats*>> out;
  for (auto e : out_edges(node_id(code))) out.emplace_back(nodes_[edges_[e].target].code, &edges_[e]);
  return out;
}

std::vector<std::pair<std::string, const EdgeStats*>> TransitionNetwork::predecessors(std::string_view code) const {
  std::vector<std::pair<std::string, const EdgeStats*>> out;
  for (auto e : in_edges(node_id(code))) out.emplace_back(nodes_[edges_[e].source].code, &edges_[e]);
  return out;
}

bool TransitionNetwork::operator==(const TransitionNetwork& other) const {
  if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].code != other.nodes_[i].code || nodes_[i].freq != other.nodes_[i].freq) return false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& a = edges_[i];
    const auto& b = other.edges_[i];
    if (a.source != b.source || a.target != b.target || a.count != b.count || a.intervals != b.intervals)
      return false;
  }
  return true;
}

std::string TransitionNetwork::to_json() const {
  nlohmann::json doc;
  doc["format"] = "cict.network";
  doc["version"] = kNetworkFormatVersion;
  doc["total_transitions"] = total_transitions_;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes_) nodes.push_back({{"code", n.code}, {"freq", n.freq}});
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const auto& e : edges_)
    edges.push_back({{"source", nodes_[e.source].code},
                     {"target", nodes_[e.target].code},
                     {"count", e.count},
                     {"intervals", e.intervals}});
  return doc.dump();
}

TransitionNetwork TransitionNetwork::from_json(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "cict.network")
    throw Error(ErrorKind::Format, "not a cict.network document");
  if (doc.value("version", 0) != kNetworkFormatVersion)
    throw Error(ErrorKind::Format, "unsupported network version");
  try {
    TransitionNetwork net;
    for (const auto& n : doc.at("nodes")) {
      auto code = n.at("code").get<std::string>();
      if (!net.index_.emplace(code, static_cast<NodeId>(net.nodes_.size())).second)
        throw Error(ErrorKind::Format, "duplicate node '" + code + "'");
      net.nodes_.push_back(NodeStats{code, n.at("freq").get<std::size_t>()});
    }
    for (const auto& e : doc.at("edges")) {
      EdgeStats es;
      es.source = net.node_id(e.at("source").get<std::string>());
      es.target = net.node_id(e.at("target").get<std::string>());
      es.count = e.at("count").get<std::size_t>();
      es.intervals = e.at("intervals").get<std::vector<std::int64_t>>();
      if (es.count == 0 || es.intervals.size() != es.count)
        throw Error(ErrorKind::Format, "edge count does not match its interval list");
      std::sort(es.intervals.begin(), es.intervals.end());
      net.edges_.push_back(std::move(es));
    }
    std::sort(net.edges_.begin(), net.edges_.end(), [](const EdgeStats& a, const EdgeStats& b) {
      return edge_key(a.source, a.target) < edge_key(b.source, b.target);
    });
    // Codes must be in ascending order for the indexing invariant.
    for (std::size_t i = 1; i < net.nodes_.size(); ++i)
      if (!(net.nodes_[i - 1].code < net.nodes_[i].code))
        throw Error(ErrorKind::Format, "nodes must be sorted by code");
    net.finalize();
    if (net.total_transitions_ != doc.at("total_transitions").get<std::size_t>())
      throw Error(ErrorKind::Format, "total_transitions disagrees with edge counts");
    return net;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Format, std::string("malformed network document: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::Lookup) throw Error(ErrorKind::Format, ex.what());
    throw;
  }
}

TransitionNetwork build_network(const std::vector<Transition>& ts, const SequenceDataset& freq_source) {
  return TransitionNetwork::build(ts, freq_source.code_frequencies());
}

}  // namespace cict
