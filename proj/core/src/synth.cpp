#include "cict/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "cict/error.hpp"
#include "cict/parallel.hpp"
#include "cict/rng.hpp"

namespace cict {
namespace {

constexpr std::uint64_t kWalkTag = 0x3a1c;
constexpr std::uint64_t kPlantTag = 0x91a27;
constexpr std::uint64_t kSampleTag = 0x5a3b1e;
constexpr std::uint64_t kSplitTag = 0x5b117;

std::size_t digits(std::size_t n) {
  std::size_t d = 1;
  while (n >= 10) n /= 10, ++d;
  return d;
}

std::string padded(char prefix, std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return prefix + s;
}

void spec_check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Spec, "infeasible synth spec: " + what);
}

// Outgoing planted links of one node, as a cumulative table.
struct Links {
  std::vector<std::size_t> targets;
  std::vector<double> cumulative;

  void add(std::size_t target, double p) {
    targets.push_back(target);
    cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + p);
  }
  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

std::int64_t log_uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  const auto v = static_cast<std::int64_t>(std::llround(std::exp(rng.uniform(a, b))));
  return std::clamp(v, lo, hi);
}

}  // namespace

NodeRole PlantedNetworkSpec::role(std::size_t node) const noexcept {
  if (node < causes) return NodeRole::Cause;
  if (node < causes + effects) return NodeRole::Effect;
  return NodeRole::Random;
}

std::string PlantedNetworkSpec::code(std::size_t node) const {
  return padded('N', node, std::max<std::size_t>(3, digits(n_nodes == 0 ? 0 : n_nodes - 1)));
}

void PlantedNetworkSpec::validate() const {
  spec_check(n_nodes >= 2, "need at least 2 nodes");
  spec_check(causes + effects <= n_nodes, "role counts exceed n_nodes");
  spec_check(mean_sequence_length >= 2.0, "mean_sequence_length must be >= 2");
  spec_check(random_background_rate >= 0.0 && random_background_rate <= 1.0, "random_background_rate outside [0,1]");
  spec_check(leak_fraction >= 0.0 && leak_fraction < 0.2, "leak_fraction must be in [0, 0.2)");
  spec_check(causal_interval_min >= 1 && causal_interval_min <= causal_interval_max, "bad causal interval range");
  spec_check(random_interval_min >= 1 && random_interval_min <= random_interval_max, "bad random interval range");
  std::vector<double> out(n_nodes, 0.0), leak(n_nodes, 0.0);
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (const auto& p : causal_pairs) {
    spec_check(p.cause < n_nodes && p.effect < n_nodes, "pair references node outside n_nodes");
    spec_check(p.cause != p.effect, "self pair " + code(p.cause));
    spec_check(role(p.cause) == NodeRole::Cause, code(p.cause) + " is not a cause node");
    spec_check(role(p.effect) == NodeRole::Effect, code(p.effect) + " is not an effect node");
    spec_check(p.strength > 0.0 && p.strength <= 1.0, "strength outside (0,1]");
    spec_check(++seen[{p.cause, p.effect}] == 1, "duplicate pair " + code(p.cause) + "->" + code(p.effect));
    out[p.cause] += p.strength;
    leak[p.effect] += p.strength * leak_fraction;
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    spec_check(out[i] <= 1.0 + 1e-12, "strengths from " + code(i) + " sum to " + std::to_string(out[i]));
    spec_check(leak[i] <= 1.0 + 1e-12, "reverse leaks from " + code(i) + " sum above 1");
  }
}

void PlantedNetworkSpec::plant_causes(std::size_t effects_per_cause, double strength_min, double strength_max,
                                      std::uint64_t seed) {
  spec_check(effects_per_cause <= effects, "effects_per_cause exceeds the effect node count");
  spec_check(strength_min > 0.0 && strength_min <= strength_max && strength_max <= 1.0, "bad strength range");
  causal_pairs.clear();
  std::vector<std::size_t> pool(effects);
  for (std::size_t c = 0; c < causes; ++c) {
    Rng rng(derive_seed(seed, kPlantTag, c));
    for (std::size_t e = 0; e < effects; ++e) pool[e] = causes + e;
    rng.shuffle(std::span<std::size_t>(pool));
    const double total = rng.uniform(strength_min, strength_max);
    std::vector<double> w(effects_per_cause);
    double sum = 0;
    for (auto& x : w) sum += (x = 0.5 + rng.uniform());
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(effects_per_cause));
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t k = 0; k < effects_per_cause; ++k) causal_pairs.push_back({c, chosen[k], total * w[k] / sum});
  }
}

PlantedNetworkSpec PlantedNetworkSpec::desk_world(std::uint64_t seed) {
  PlantedNetworkSpec s;
  s.rng_seed = seed;
  s.plant_causes(10, 0.3, 0.7, seed);
  return s;
}

PlantedNetworkSpec PlantedNetworkSpec::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("synth spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "synth spec must be an object");
  PlantedNetworkSpec s;
  try {
    s.n_nodes = j.value("n_nodes", s.n_nodes);
    s.n_entities = j.value("n_entities", s.n_entities);
    s.mean_sequence_length = j.value("mean_sequence_length", s.mean_sequence_length);
    s.random_background_rate = j.value("random_background_rate", s.random_background_rate);
    s.leak_fraction = j.value("leak_fraction", s.leak_fraction);
    s.rng_seed = j.value("rng_seed", s.rng_seed);
    if (j.contains("roles")) {
      const auto& r = j.at("roles");
      s.causes = r.value("cause", s.causes);
      s.effects = r.value("effect", s.effects);
      if (r.contains("random") && r.at("random").get<std::size_t>() + s.causes + s.effects != s.n_nodes)
        throw Error(ErrorKind::Spec, "infeasible synth spec: roles do not partition the node set");
    }
    if (j.contains("causal_interval")) {
      s.causal_interval_min = j.at("causal_interval").at(0).get<std::int64_t>();
      s.causal_interval_max = j.at("causal_interval").at(1).get<std::int64_t>();
    }
    if (j.contains("random_interval")) {
      s.random_interval_min = j.at("random_interval").at(0).get<std::int64_t>();
      s.random_interval_max = j.at("random_interval").at(1).get<std::int64_t>();
    }
    if (s.causes + s.effects > s.n_nodes) spec_check(false, "role counts exceed n_nodes");
    if (j.contains("causal_pairs")) {
      for (const auto& p : j.at("causal_pairs"))
        s.causal_pairs.push_back({p.at("cause").get<std::size_t>(), p.at("effect").get<std::size_t>(),
                                  p.at("strength").get<double>()});
    } else if (j.contains("planted")) {
      const auto& p = j.at("planted");
      s.plant_causes(p.value("effects_per_cause", std::size_t{8}), p.value("strength_min", 0.3),
                     p.value("strength_max", 0.7), s.rng_seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad synth spec field: ") + e.what());
  }
  s.validate();
  return s;
}

PlantedNetworkSpec PlantedNetworkSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() != ".toml") return parse_json(buf.str());
  try {
    const toml::table tbl = toml::parse(buf.str(), path.string());
    std::ostringstream js;
    js << toml::json_formatter{tbl};
    return parse_json(js.str());
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::Config, "synth spec is not valid TOML: " + std::string(e.description()));
  }
}

EdgeLabel GroundTruth::label(const std::string& source, const std::string& target) const {
  if (source == target) return EdgeLabel::None;
  const auto it = planted.find(EdgeKey{source, target});
  return it == planted.end() ? EdgeLabel::Random : it->second;
}

SynthOutput generate(const PlantedNetworkSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t n = spec.n_nodes;
  std::vector<Links> forward(n), reverse(n);
  for (const auto& p : spec.causal_pairs) {
    forward[p.cause].add(p.effect, p.strength);
    if (spec.leak_fraction > 0) reverse[p.effect].add(p.cause, p.strength * spec.leak_fraction);
  }

  SynthOutput out;
  auto& truth = out.truth;
  for (std::size_t i = 0; i < n; ++i) {
    truth.codes.push_back(spec.code(i));
    truth.roles.push_back(spec.role(i));
  }
  for (const auto& p : spec.causal_pairs) {
    truth.planted[EdgeKey{truth.codes[p.cause], truth.codes[p.effect]}] = EdgeLabel::Causal;
    truth.planted[EdgeKey{truth.codes[p.effect], truth.codes[p.cause]}] = EdgeLabel::ReverseCausal;
  }

  // Length = 2 + Geometric with mean (L - 2).
  const double p_continue = (spec.mean_sequence_length - 2.0) / (spec.mean_sequence_length - 1.0);
  const std::size_t width = digits(spec.n_entities == 0 ? 0 : spec.n_entities - 1);
  std::vector<EntityHistory> entities(spec.n_entities);
  parallel_for(spec.n_entities, threads, [&](std::size_t e) {
    Rng rng(derive_seed(spec.rng_seed, kWalkTag, e));
    auto& h = entities[e];
    h.entity_id = padded('E', e, width);
    std::size_t node = static_cast<std::size_t>(rng.below(n));
    std::int64_t t = static_cast<std::int64_t>(rng.below(3650));
    h.events.push_back({h.entity_id, truth.codes[node], t});
    bool more = true;
    while (more) {
      std::size_t next = n;
      bool planted = false;
      if (!rng.bernoulli(spec.random_background_rate)) {
        const Links& links = forward[node].targets.empty() ? reverse[node] : forward[node];
        const double r = rng.uniform();
        for (std::size_t k = 0; k < links.targets.size(); ++k)
          if (r < links.cumulative[k]) {
            next = links.targets[k];
            planted = &links == &forward[node];
            break;
          }
      }
      if (next == n) {
        next = static_cast<std::size_t>(rng.below(n - 1));
        if (next >= node) ++next;
      }
      t += planted ? log_uniform(rng, spec.causal_interval_min, spec.causal_interval_max)
                   : log_uniform(rng, spec.random_interval_min, spec.random_interval_max);
      h.events.push_back({h.entity_id, truth.codes[next], t});
      node = next;
      more = rng.bernoulli(p_continue);
    }
  });
  for (const auto& h : entities) out.dataset.record_count += h.events.size();
  out.dataset.entities = std::move(entities);
  return out;
}

std::vector<EdgeLabel> label_edges(const GroundTruth& truth, const TransitionNetwork& net) {
  std::vector<EdgeLabel> out;
  out.reserve(net.edges().size());
  for (const auto& e : net.edges()) out.push_back(truth.label(net.node(e.source).code, net.node(e.target).code));
  return out;
}

std::vector<EdgeLabel> label_edges(const LabelMap& labels, const TransitionNetwork& net) {
  GroundTruth t;
  t.planted = labels;
  return label_edges(t, net);
}

SetMode parse_set_mode(const std::string& name) {
  if (name == "random_vs_causal") return SetMode::RandomVsCausal;
  if (name == "direction") return SetMode::Direction;
  if (name == "mixed") return SetMode::Mixed;
  throw Error(ErrorKind::Config, "unknown set mode '" + name + "' (random_vs_causal|direction|mixed)");
}

std::vector<LabeledKey> sample_edges(const std::vector<std::pair<EdgeKey, EdgeLabel>>& candidates, SetMode mode,
                                     const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  const std::size_t want = mode == SetMode::Mixed ? 3 : 2;
  if (sizes.size() != want)
    throw Error(ErrorKind::Config, "set mode expects " + std::to_string(want) + " sizes");
  if (mode == SetMode::Direction && sizes[0] != sizes[1])
    throw Error(ErrorKind::Config, "direction mode samples pairs; both sizes must match");

  // Candidates of each class, in key order so sampling is independent of input order.
  std::map<EdgeKey, EdgeLabel> by_key(candidates.begin(), candidates.end());
  std::map<EdgeLabel, std::vector<EdgeKey>> pools;
  for (const auto& [k, l] : by_key) pools[l].push_back(k);

  auto draw = [&](EdgeLabel label, std::size_t count, std::uint64_t index) {
    auto pool = pools[label];
    if (pool.size() < count)
      throw Error(ErrorKind::Sampling, "not enough " + std::string(to_string(label)) + " edges: need " +
                                           std::to_string(count) + ", have " + std::to_string(pool.size()));
    Rng rng(derive_seed(seed, kSampleTag, index));
    rng.shuffle(std::span<EdgeKey>(pool));
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
  };

  std::vector<LabeledKey> chosen;
  switch (mode) {
    case SetMode::RandomVsCausal:
      for (auto& k : draw(EdgeLabel::Causal, sizes[0], 0)) chosen.push_back({k, EdgeLabel::Causal});
      for (auto& k : draw(EdgeLabel::Random, sizes[1], 1)) chosen.push_back({k, EdgeLabel::Random});
      break;
    case SetMode::Direction: {
      // Causal edges whose reverse edge is also observed.
      auto& causal = pools[EdgeLabel::Causal];
      std::vector<EdgeKey> paired;
      for (const auto& k : causal) {
        const auto it = by_key.find(EdgeKey{k.target, k.source});
        if (it != by_key.end() && it->second == EdgeLabel::ReverseCausal) paired.push_back(k);
      }
      causal = paired;
      try {
        for (auto& k : draw(EdgeLabel::Causal, sizes[0], 0)) {
          chosen.push_back({k, EdgeLabel::Causal});
          chosen.push_back({EdgeKey{k.target, k.source}, EdgeLabel::ReverseCausal});
        }
      } catch (const Error&) {
        throw Error(ErrorKind::Sampling, "not enough causal/reverse_causal edge pairs: need " +
                                             std::to_string(sizes[0]) + ", have " + std::to_string(paired.size()));
      }
      break;
    }
    case SetMode::Mixed:
      for (auto& k : draw(EdgeLabel::Causal, sizes[0], 0)) chosen.push_back({k, EdgeLabel::Causal});
      for (auto& k : draw(EdgeLabel::ReverseCausal, sizes[1], 1)) chosen.push_back({k, EdgeLabel::ReverseCausal});
      for (auto& k : draw(EdgeLabel::Random, sizes[2], 2)) chosen.push_back({k, EdgeLabel::Random});
      break;
  }

  // Group: an edge together with its reverse when both were sampled.
  std::sort(chosen.begin(), chosen.end(), [](const LabeledKey& a, const LabeledKey& b) { return a.key < b.key; });
  std::map<EdgeKey, std::size_t> index;
  for (std::size_t i = 0; i < chosen.size(); ++i) index[chosen[i].key] = i;
  for (auto& c : chosen) c.group = -1;
  int next_group = 0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i].group >= 0) continue;
    chosen[i].group = next_group;
    const auto it = index.find(EdgeKey{chosen[i].key.target, chosen[i].key.source});
    if (it != index.end()) chosen[it->second].group = next_group;
    ++next_group;
  }
  return chosen;
}

ExperimentSets split_edges(const std::vector<LabeledKey>& chosen, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::Config, "train fraction must be in (0,1)");
  // Units: rows sharing a group id.
  std::map<int, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < chosen.size(); ++i) by_group[chosen[i].group].push_back(i);
  std::vector<std::vector<std::size_t>> units;
  for (auto& [g, rows] : by_group) units.push_back(std::move(rows));
  // Stratify units by their sorted label composition.
  std::map<std::vector<EdgeLabel>, std::vector<std::size_t>> strata;
  for (std::size_t u = 0; u < units.size(); ++u) {
    std::vector<EdgeLabel> sig;
    for (auto i : units[u]) sig.push_back(chosen[i].label);
    std::sort(sig.begin(), sig.end());
    strata[sig].push_back(u);
  }
  ExperimentSets sets;
  std::uint64_t s_index = 0;
  for (auto& [sig, members] : strata) {
    Rng rng(derive_seed(seed, kSplitTag, s_index++));
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * members.size() + 0.5));
    for (std::size_t m = 0; m < members.size(); ++m) {
      auto& dst = m < n_train ? sets.train : sets.test;
      for (auto i : units[members[m]]) {
        dst.push_back(chosen[i]);
      }
    }
  }
  auto by_key_order = [](const LabeledKey& a, const LabeledKey& b) { return a.key < b.key; };
  std::sort(sets.train.begin(), sets.train.end(), by_key_order);
  std::sort(sets.test.begin(), sets.test.end(), by_key_order);
  return sets;
}

ExperimentSets make_experiment_sets(const std::vector<std::pair<EdgeKey, EdgeLabel>>& candidates, SetMode mode,
                                    const std::vector<std::size_t>& sizes, double train_fraction,
                                    std::uint64_t seed) {
  return split_edges(sample_edges(candidates, mode, sizes, seed), train_fraction, seed);
}

}  // namespace cict
