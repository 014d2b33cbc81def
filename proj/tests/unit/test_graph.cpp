#include <doctest.h>

#include <algorithm>
#include <map>

#include "cict/error.hpp"
#include "cict/graph.hpp"
#include "cict/rng.hpp"
#include "../support/fixtures.hpp"

using namespace cict;

TEST_CASE("small network aggregates counts") {
  const auto net = fixture::small_network();
  CHECK(net.node_count() == 3);
  CHECK(net.edge_count() == 3);
  CHECK(net.total_transitions() == 15);
  CHECK(net.node(net.node_id("A")).out_total == 10);
  CHECK(net.node(net.node_id("C")).in_total == 7);
  CHECK(net.node(net.node_id("A")).freq == 10);
}

TEST_CASE("empty transition list") {
  const auto net = TransitionNetwork::build({}, {});
  CHECK(net.node_count() == 0);
  CHECK(net.edge_count() == 0);
}

TEST_CASE("missing frequency is a consistency error") {
  try {
    TransitionNetwork::build({{"A", "Z", 1}}, {{"A", 1}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Consistency);
  }
}

TEST_CASE("reverse counts") {
  const auto e1 = fixture::small_network();
  CHECK(e1.reverse_count("A", "B") == 0);
  CHECK(e1.reverse_count("B", "A") == 8);
  std::vector<Transition> ts;
  for (int i = 0; i < 3; ++i) ts.push_back({"A", "B", 1});
  for (int i = 0; i < 4; ++i) ts.push_back({"B", "A", 1});
  const auto net = TransitionNetwork::build(ts, {{"A", 5}, {"B", 5}});
  CHECK(net.reverse_count("A", "B") == 4);
  CHECK(net.reverse_count("B", "A") == 3);
  CHECK_THROWS_AS(net.node_id("Q"), Error);
}

TEST_CASE("adjacency") {
  const auto net = fixture::small_network();
  const auto succ = net.successors("A");
  REQUIRE(succ.size() == 2);
  CHECK(succ[0].first == "B");
  CHECK(succ[0].second->count == 8);
  CHECK(succ[1].first == "C");
  CHECK(succ[1].second->count == 2);
  CHECK(net.predecessors("A").empty());
}

TEST_CASE("nodes seen only in records keep zero degree") {
  const auto net = TransitionNetwork::build({{"A", "B", 1}}, {{"A", 1}, {"B", 1}, {"Lonely", 4}});
  const auto id = net.node_id("Lonely");
  CHECK(net.node(id).freq == 4);
  CHECK(net.out_edges(id).empty());
  CHECK(net.in_edges(id).empty());
}

namespace {
std::vector<Transition> random_transitions(std::uint64_t seed, std::size_t n, std::size_t nodes) {
  Rng rng(seed);
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < n; ++i)
    ts.push_back({"n" + std::to_string(rng.below(nodes)), "n" + std::to_string(rng.below(nodes)),
                  static_cast<std::int64_t>(rng.below(50))});
  return ts;
}

std::map<std::string, std::size_t> unit_freqs(std::size_t nodes) {
  std::map<std::string, std::size_t> f;
  for (std::size_t i = 0; i < nodes; ++i) f["n" + std::to_string(i)] = 1 + i;
  return f;
}
}  // namespace

TEST_CASE("brute-force recount of 1000 random transitions") {
  const auto ts = random_transitions(3, 1000, 10);
  const auto net = TransitionNetwork::build(ts, unit_freqs(10));
  std::map<std::pair<std::string, std::string>, std::size_t> edges;
  std::map<std::string, std::size_t> out, in;
  for (const auto& t : ts) {
    ++edges[{t.source, t.target}];
    ++out[t.source];
    ++in[t.target];
  }
  std::size_t sum = 0;
  for (const auto& e : net.edges()) {
    sum += e.count;
    CHECK(e.count == edges.at({net.node(e.source).code, net.node(e.target).code}));
    CHECK(e.intervals.size() == e.count);
    CHECK(std::is_sorted(e.intervals.begin(), e.intervals.end()));
  }
  CHECK(sum == 1000);
  CHECK(net.edge_count() == edges.size());
  std::size_t in_sum = 0, out_sum = 0;
  for (const auto& n : net.nodes()) {
    CHECK(n.out_total == out[n.code]);
    CHECK(n.in_total == in[n.code]);
    in_sum += n.in_total;
    out_sum += n.out_total;
  }
  CHECK(in_sum == net.total_transitions());
  CHECK(out_sum == net.total_transitions());

  // adjacency agrees with a full scan of the edge map
  for (const auto& n : net.nodes()) {
    std::vector<std::pair<std::string, std::size_t>> scan_s, scan_p, got_s, got_p;
    for (const auto& [k, c] : edges) {
      if (k.first == n.code) scan_s.emplace_back(k.second, c);
      if (k.second == n.code) scan_p.emplace_back(k.first, c);
    }
    for (const auto& [code, e] : net.successors(n.code)) got_s.emplace_back(code, e->count);
    for (const auto& [code, e] : net.predecessors(n.code)) got_p.emplace_back(code, e->count);
    std::sort(scan_p.begin(), scan_p.end());
    CHECK(got_s == scan_s);
    CHECK(got_p == scan_p);
  }
}

TEST_CASE("property: input order does not matter") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ts = random_transitions(seed, 300, 12);
    const auto a = TransitionNetwork::build(ts, unit_freqs(12));
    Rng rng(seed + 100);
    rng.shuffle(std::span<Transition>(ts));
    const auto b = TransitionNetwork::build(ts, unit_freqs(12));
    CHECK(a == b);
    CHECK(a.to_json() == b.to_json());
  }
}

TEST_CASE("json round trip and validation") {
  const auto net = TransitionNetwork::build(random_transitions(9, 200, 8), unit_freqs(8));
  const auto back = TransitionNetwork::from_json(net.to_json());
  CHECK(back == net);
  CHECK_THROWS_AS(TransitionNetwork::from_json("{\"format\":\"other\"}"), Error);
  CHECK_THROWS_AS(TransitionNetwork::from_json("not json"), Error);
}
