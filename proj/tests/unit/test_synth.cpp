#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "cict/error.hpp"
#include "cict/graph.hpp"
#include "cict/synth.hpp"

using namespace cict;

namespace {

using PairCounts = std::map<std::pair<std::string, std::string>, double>;

void count(const SequenceDataset& ds, PairCounts& pairs, std::map<std::string, double>& out) {
  for (const auto& t : extract_transitions(ds)) {
    pairs[{t.source, t.target}] += 1;
    out[t.source] += 1;
  }
}

std::vector<std::pair<EdgeKey, EdgeLabel>> candidates(std::size_t causal, std::size_t random) {
  std::vector<std::pair<EdgeKey, EdgeLabel>> c;
  for (std::size_t i = 0; i < causal; ++i) {
    c.push_back({{"C" + std::to_string(i), "E" + std::to_string(i)}, EdgeLabel::Causal});
    c.push_back({{"E" + std::to_string(i), "C" + std::to_string(i)}, EdgeLabel::ReverseCausal});
  }
  for (std::size_t i = 0; i < random; ++i) c.push_back({{"R" + std::to_string(i), "S" + std::to_string(i)}, EdgeLabel::Random});
  return c;
}

}  // namespace

TEST_CASE("deterministic link") {
  PlantedNetworkSpec spec;
  spec.n_nodes = 5;
  spec.causes = 1;
  spec.effects = 1;
  spec.n_entities = 2000;
  spec.leak_fraction = 0.0;
  spec.causal_pairs = {{0, 1, 1.0}};
  const auto out = generate(spec);
  std::size_t seen = 0;
  for (const auto& h : out.dataset.entities)
    for (std::size_t k = 0; k + 1 < h.events.size(); ++k)
      if (h.events[k].event_code == spec.code(0)) {
        ++seen;
        CHECK(h.events[k + 1].event_code == spec.code(1));
      }
  CHECK(seen > 100);
}

TEST_CASE("background-only walks are uniform") {
  PlantedNetworkSpec spec;
  spec.n_nodes = 10;
  spec.causes = 0;
  spec.effects = 0;
  spec.n_entities = 20000;
  spec.rng_seed = 3;
  const auto out = generate(spec);
  PairCounts pairs;
  std::map<std::string, double> from;
  count(out.dataset, pairs, from);
  const double p = 1.0 / 9.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      const auto a = spec.code(i), b = spec.code(j);
      const double n = from[a];
      const double c = pairs[{a, b}];
      if (i == j) {
        CHECK(c == 0);
        continue;
      }
      CHECK(std::abs(c / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("generation is deterministic and thread independent") {
  auto spec = PlantedNetworkSpec::desk_world(5);
  spec.n_entities = 3000;
  const auto a = generate(spec, 1);
  const auto b = generate(spec, 4);
  REQUIRE(a.dataset.entities.size() == b.dataset.entities.size());
  for (std::size_t e = 0; e < a.dataset.entities.size(); ++e) CHECK(a.dataset.entities[e].events == b.dataset.entities[e].events);
  spec.rng_seed = 6;
  spec.plant_causes(10, 0.3, 0.7, 6);
  const auto c = generate(spec, 1);
  CHECK(c.dataset.entities[0].events != a.dataset.entities[0].events);
}

TEST_CASE("sequences and intervals") {
  auto spec = PlantedNetworkSpec::desk_world(0);
  spec.n_entities = 5000;
  const auto out = generate(spec);
  double total = 0;
  for (const auto& h : out.dataset.entities) {
    CHECK(h.events.size() >= 2);
    total += static_cast<double>(h.events.size());
  }
  CHECK(std::abs(total / 5000.0 - spec.mean_sequence_length) < 0.15);
  for (const auto& t : extract_transitions(out.dataset)) {
    const auto lab = out.truth.label(t.source, t.target);
    CHECK(t.source != t.target);
    if (lab == EdgeLabel::Random || lab == EdgeLabel::ReverseCausal) {
      CHECK(t.interval >= spec.random_interval_min);
      CHECK(t.interval <= spec.random_interval_max);
    } else {
      CHECK(t.interval >= spec.causal_interval_min);
      CHECK(t.interval <= spec.causal_interval_max);
    }
  }
}

TEST_CASE("desk world roles and planted pairs") {
  const auto spec = PlantedNetworkSpec::desk_world(0);
  CHECK(spec.causal_pairs.size() == 400);
  CHECK(spec.random_nodes() == 80);
  std::map<std::size_t, double> out;
  for (const auto& p : spec.causal_pairs) {
    CHECK(spec.role(p.cause) == NodeRole::Cause);
    CHECK(spec.role(p.effect) == NodeRole::Effect);
    out[p.cause] += p.strength;
  }
  CHECK(out.size() == 40);
  for (const auto& [c, s] : out) {
    CHECK(s >= 0.3 - 1e-12);
    CHECK(s <= 0.7 + 1e-12);
  }
}

TEST_CASE("planted strength and asymmetry are visible in the data") {
  const auto spec = PlantedNetworkSpec::desk_world(0);
  const auto out = generate(spec);
  PairCounts pairs;
  std::map<std::string, double> from;
  count(out.dataset, pairs, from);
  std::map<std::size_t, double> total;
  for (const auto& p : spec.causal_pairs) total[p.cause] += p.strength;
  const double n1 = static_cast<double>(spec.n_nodes - 1);
  std::size_t within = 0, asymmetric = 0;
  for (const auto& p : spec.causal_pairs) {
    const auto a = spec.code(p.cause), b = spec.code(p.effect);
    // uniform background can also land on the effect
    const double expect = p.strength + (1.0 - total[p.cause]) / n1;
    const double n = from[a];
    const double conf = pairs[{a, b}] / n;
    within += std::abs(conf - expect) <= 3.0 * std::sqrt(expect * (1 - expect) / n);
    const double back = pairs[{b, a}] / from[b];
    asymmetric += conf > back;
  }
  // 3-sigma coverage is 99.7% per pair
  CHECK(within >= 392);
  CHECK(asymmetric == spec.causal_pairs.size());
}

TEST_CASE("edge labels") {
  PlantedNetworkSpec spec;
  spec.n_nodes = 6;
  spec.causes = 1;
  spec.effects = 1;
  spec.n_entities = 500;
  spec.causal_pairs = {{0, 1, 0.5}};
  const auto out = generate(spec);
  CHECK(out.truth.label("N000", "N001") == EdgeLabel::Causal);
  CHECK(out.truth.label("N001", "N000") == EdgeLabel::ReverseCausal);
  CHECK(out.truth.label("N002", "N003") == EdgeLabel::Random);
  CHECK(out.truth.label("N002", "N002") == EdgeLabel::None);
  const auto net = TransitionNetwork::build(extract_transitions(out.dataset), out.dataset.code_frequencies());
  const auto labels = label_edges(out.truth, net);
  REQUIRE(labels.size() == net.edge_count());
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& s = net.node(net.edge(e).source).code;
    const auto& t = net.node(net.edge(e).target).code;
    CHECK(labels[e] == out.truth.label(s, t));
  }
  const auto other = label_edges(LabelMap{}, net);
  for (auto l : other) CHECK(l == EdgeLabel::Random);
}

TEST_CASE("random vs causal sets") {
  const auto cands = candidates(300, 300);
  const auto sets = make_experiment_sets(cands, SetMode::RandomVsCausal, {267, 267}, 0.75, 1);
  CHECK(sets.train.size() + sets.test.size() == 534);
  CHECK(sets.train.size() >= 400);
  CHECK(sets.train.size() <= 401);
  std::map<EdgeLabel, int> tr, te;
  for (const auto& k : sets.train) ++tr[k.label];
  for (const auto& k : sets.test) ++te[k.label];
  CHECK(std::abs(tr[EdgeLabel::Causal] - tr[EdgeLabel::Random]) <= 1);
  CHECK(std::abs(te[EdgeLabel::Causal] - te[EdgeLabel::Random]) <= 1);
  CHECK(tr[EdgeLabel::ReverseCausal] == 0);

  std::set<EdgeKey> seen;
  for (const auto* part : {&sets.train, &sets.test})
    for (const auto& k : *part) CHECK(seen.insert(k.key).second);

  const auto again = make_experiment_sets(cands, SetMode::RandomVsCausal, {267, 267}, 0.75, 1);
  CHECK(again.train.size() == sets.train.size());
  for (std::size_t i = 0; i < again.train.size(); ++i) CHECK(again.train[i].key == sets.train[i].key);
}

TEST_CASE("direction pairs never straddle the split") {
  const auto cands = candidates(300, 10);
  const auto sets = make_experiment_sets(cands, SetMode::Direction, {225, 225}, 0.75, 2);
  std::map<EdgeKey, int> side;
  for (const auto& k : sets.train) side[k.key] = 0;
  for (const auto& k : sets.test) side[k.key] = 1;
  CHECK(side.size() == 450);
  for (const auto& [key, s] : side) {
    const EdgeKey rev{key.target, key.source};
    REQUIRE(side.count(rev));
    CHECK(side[rev] == s);
  }
}

TEST_CASE("mixed sets and sampling errors") {
  const auto cands = candidates(300, 900);
  const auto sample = sample_edges(cands, SetMode::Mixed, {250, 90, 840}, 3);
  std::map<EdgeLabel, int> n;
  for (const auto& k : sample) ++n[k.label];
  CHECK(n[EdgeLabel::Causal] == 250);
  CHECK(n[EdgeLabel::ReverseCausal] == 90);
  CHECK(n[EdgeLabel::Random] == 840);

  try {
    sample_edges(candidates(10, 500), SetMode::RandomVsCausal, {267, 267}, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Sampling);
    CHECK(std::string(e.what()).find("causal") != std::string::npos);
  }
  try {
    sample_edges(candidates(500, 10), SetMode::RandomVsCausal, {267, 267}, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("random") != std::string::npos);
  }
}

TEST_CASE("infeasible specs") {
  auto bad = [](auto mutate) {
    PlantedNetworkSpec s;
    s.n_nodes = 6;
    s.causes = 2;
    s.effects = 2;
    s.causal_pairs = {{0, 2, 0.5}, {0, 3, 0.4}};
    mutate(s);
    try {
      s.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Spec;
    }
    return false;
  };
  CHECK(!bad([](PlantedNetworkSpec&) {}));
  CHECK(bad([](PlantedNetworkSpec& s) { s.causal_pairs[1].strength = 0.6; }));  // sums above 1
  CHECK(bad([](PlantedNetworkSpec& s) { s.causal_pairs[0].strength = 0.0; }));
  CHECK(bad([](PlantedNetworkSpec& s) { s.causal_pairs.push_back({0, 2, 0.05}); }));
  CHECK(bad([](PlantedNetworkSpec& s) { s.causal_pairs.push_back({2, 3, 0.1}); }));  // effect as cause
  CHECK(bad([](PlantedNetworkSpec& s) { s.causal_pairs.push_back({1, 9, 0.1}); }));
  CHECK(bad([](PlantedNetworkSpec& s) { s.causes = 5; }));
  CHECK(bad([](PlantedNetworkSpec& s) { s.leak_fraction = 0.3; }));
}

TEST_CASE("spec files") {
  const std::filesystem::path dir = std::filesystem::path(CICT_TEST_TMP) / "synth_spec";
  std::filesystem::create_directories(dir);
  {
    std::ofstream toml(dir / "spec.toml");
    toml << "n_nodes = 12\nn_entities = 100\nmean_sequence_length = 4.0\nrng_seed = 9\n"
            "causal_interval = [1, 50]\n\n[roles]\ncause = 2\neffect = 4\nrandom = 6\n\n"
            "[[causal_pairs]]\ncause = 0\neffect = 2\nstrength = 0.5\n\n"
            "[[causal_pairs]]\ncause = 1\neffect = 5\nstrength = 0.25\n";
  }
  const auto s = PlantedNetworkSpec::load(dir / "spec.toml");
  CHECK(s.n_nodes == 12);
  CHECK(s.n_entities == 100);
  CHECK(s.rng_seed == 9);
  CHECK(s.causes == 2);
  CHECK(s.causal_interval_max == 50);
  REQUIRE(s.causal_pairs.size() == 2);
  CHECK(s.causal_pairs[1].strength == 0.25);

  const auto j = PlantedNetworkSpec::parse_json(
      R"({"n_nodes": 30, "roles": {"cause": 5, "effect": 10}, "planted": {"effects_per_cause": 3}})");
  CHECK(j.causal_pairs.size() == 15);
  j.validate();

  try {
    PlantedNetworkSpec::parse_json(R"({"n_nodes": 10, "roles": {"cause": 2, "effect": 2, "random": 5}})");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Spec);
  }
  CHECK_THROWS_AS(PlantedNetworkSpec::load(dir / "missing.toml"), Error);
}
