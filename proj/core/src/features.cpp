#include "cict/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "cict/csv.hpp"
#include "cict/error.hpp"
#include "cict/hash.hpp"
#include "cict/parallel.hpp"

namespace cict {
namespace {

constexpr std::array<std::string_view, 25> kEdgeLevelNames{
    "conf",      "contrib",     "conf_rev",    "contrib_rev", "nconf",         "ncontrib",   "nconf_rev",
    "ncontrib_rev", "lift_conf", "lift_contrib", "resistance", "pressure",     "asym_conf",  "asym_contrib",
    "tz",        "tz_degenerate", "intvl_median", "edge_count", "rev_count",   "freq.x",     "freq.y",
    "outDeg.x",  "inDeg.x",     "outDeg.y",    "inDeg.y"};

constexpr std::size_t kPerProfile = kStatNames.size() + 1;  // stats + missingness flag
constexpr std::size_t kPerEndpoint = kProfiles.size() * kPerProfile;

double share(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

// Parameter of a single existing edge under a family, from the perspective of
// the conf (zones 1/3) or contrib (zones 2/4) base.
double edge_value(const TransitionNetwork& net, const EdgeStats& e, bool conf_base, Family family) {
  const auto& src = net.node(e.source);
  const auto& dst = net.node(e.target);
  const double fi = static_cast<double>(src.freq);
  const double fj = static_cast<double>(dst.freq);
  const double total = static_cast<double>(net.total_frequency());
  switch (family) {
    case Family::Raw:
      return conf_base ? share(e.count, src.out_total) : share(e.count, dst.in_total);
    case Family::Normalized:
      return conf_base ? share(e.count, src.out_total) * fj / total : share(e.count, dst.in_total) * fi / total;
    case Family::Lift: {
      const double base = conf_base ? share(e.count, src.out_total) : share(e.count, dst.in_total);
      const double prior = (conf_base ? fj : fi) / total;
      return prior > 0 ? base / prior : 0.0;
    }
    case Family::Pressure:
      return fi > 0 ? (fi - fj) * static_cast<double>(e.count) / fi : 0.0;
    case Family::Resistance:
      return std::abs(fi - fj) / static_cast<double>(e.count);
  }
  return 0.0;
}

bool is_out_zone(Zone z) { return z == Zone::OutConf || z == Zone::OutContrib; }
bool is_conf_zone(Zone z) { return z == Zone::OutConf || z == Zone::InConf; }

struct NodeCache {
  std::array<double, kPerEndpoint> flat{};
  std::vector<double> out_conf;    // zone 1 raw
  std::vector<double> in_contrib;  // zone 4 raw
};

NodeCache make_cache(const TransitionNetwork& net, NodeId id) {
  NodeCache c;
  const NodeBehavior b = node_behavior(net, id);
  for (std::size_t p = 0; p < kProfiles.size(); ++p) {
    const auto vals = flatten(b.profiles[p]);
    std::copy(vals.begin(), vals.end(), c.flat.begin() + p * kPerProfile);
    c.flat[p * kPerProfile + kStatNames.size()] = b.profiles[p].fully_defined() ? 0.0 : 1.0;
  }
  c.out_conf = zone_values(net, id, Zone::OutConf, Family::Raw);
  c.in_contrib = zone_values(net, id, Zone::InContrib, Family::Raw);
  return c;
}

void fill_row(const TransitionNetwork& net, std::size_t edge_index, const NodeCache& src, const NodeCache& dst,
              EdgeFeatureVector& out) {
  const auto& e = net.edge(edge_index);
  const auto& p = out.params = edge_params(net, e.source, e.target);
  const auto z1 = stats::zscore(p.conf, src.out_conf);
  const auto z4 = stats::zscore(p.contrib, dst.in_contrib);
  out.tz = z1.value + z4.value;
  out.tz_degenerate = z1.degenerate || z4.degenerate;
  std::vector<double> intervals(e.intervals.begin(), e.intervals.end());
  out.intvl_median = stats::median(intervals);

  const auto& ns = net.node(e.source);
  const auto& nt = net.node(e.target);
  out.values.clear();
  out.values.reserve(feature_names().size());
  const double edge_level[] = {p.conf,
                               p.contrib,
                               p.conf_rev,
                               p.contrib_rev,
                               p.nconf,
                               p.ncontrib,
                               p.nconf_rev,
                               p.ncontrib_rev,
                               p.lift_conf,
                               p.lift_contrib,
                               p.resistance,
                               p.pressure,
                               p.asym_conf,
                               p.asym_contrib,
                               out.tz,
                               out.tz_degenerate ? 1.0 : 0.0,
                               out.intvl_median,
                               static_cast<double>(e.count),
                               static_cast<double>(net.reverse_count(e.source, e.target)),
                               static_cast<double>(ns.freq),
                               static_cast<double>(nt.freq),
                               static_cast<double>(ns.out_degree),
                               static_cast<double>(ns.in_degree),
                               static_cast<double>(nt.out_degree),
                               static_cast<double>(nt.in_degree)};
  static_assert(std::size(edge_level) == kEdgeLevelNames.size());
  out.values.insert(out.values.end(), std::begin(edge_level), std::end(edge_level));
  out.values.insert(out.values.end(), src.flat.begin(), src.flat.end());
  out.values.insert(out.values.end(), dst.flat.begin(), dst.flat.end());
}

FeatureMatrix featurize_indices(const TransitionNetwork& net, const std::vector<std::size_t>& edge_indices,
                                unsigned threads) {
  std::vector<char> needed(net.node_count(), 0);
  for (auto ei : edge_indices) {
    needed[net.edge(ei).source] = 1;
    needed[net.edge(ei).target] = 1;
  }
  std::vector<NodeId> nodes;
  for (NodeId n = 0; n < needed.size(); ++n)
    if (needed[n]) nodes.push_back(n);

  std::vector<std::optional<NodeCache>> cache(net.node_count());
  parallel_for(nodes.size(), threads, [&](std::size_t k) { cache[nodes[k]] = make_cache(net, nodes[k]); });

  FeatureMatrix fm;
  fm.names = feature_names();
  fm.values = Matrix(edge_indices.size(), fm.names.size());
  fm.keys.resize(edge_indices.size());
  parallel_for(edge_indices.size(), threads, [&](std::size_t r) {
    const auto& e = net.edge(edge_indices[r]);
    EdgeFeatureVector v;
    fill_row(net, edge_indices[r], *cache[e.source], *cache[e.target], v);
    std::copy(v.values.begin(), v.values.end(), fm.values.row(r).begin());
    fm.keys[r] = EdgeKey{net.node(e.source).code, net.node(e.target).code};
  });
  return fm;
}

}  // namespace

EdgeParams edge_params(const TransitionNetwork& net, NodeId i, NodeId j) {
  const auto& e = net.edge(net.edge_index(i, j));
  EdgeParams p;
  p.conf = edge_value(net, e, true, Family::Raw);
  p.contrib = edge_value(net, e, false, Family::Raw);
  p.nconf = edge_value(net, e, true, Family::Normalized);
  p.ncontrib = edge_value(net, e, false, Family::Normalized);
  p.lift_conf = edge_value(net, e, true, Family::Lift);
  p.lift_contrib = edge_value(net, e, false, Family::Lift);
  p.resistance = edge_value(net, e, true, Family::Resistance);
  p.pressure = edge_value(net, e, true, Family::Pressure);
  if (auto rev = net.find_edge(j, i)) {
    const auto& r = net.edge(*rev);
    p.conf_rev = edge_value(net, r, true, Family::Raw);
    p.contrib_rev = edge_value(net, r, false, Family::Raw);
    p.nconf_rev = edge_value(net, r, true, Family::Normalized);
    p.ncontrib_rev = edge_value(net, r, false, Family::Normalized);
  }
  p.asym_conf = p.conf - p.conf_rev;
  p.asym_contrib = p.contrib - p.contrib_rev;
  return p;
}

EdgeParams edge_params(const TransitionNetwork& net, std::string_view i, std::string_view j) {
  return edge_params(net, net.node_id(i), net.node_id(j));
}

std::vector<double> zone_values(const TransitionNetwork& net, NodeId node, Zone zone, Family family) {
  const auto& edges = is_out_zone(zone) ? net.out_edges(node) : net.in_edges(node);
  std::vector<double> out;
  out.reserve(edges.size());
  for (auto ei : edges) out.push_back(edge_value(net, net.edge(ei), is_conf_zone(zone), family));
  return out;
}

NodeBehavior node_behavior(const TransitionNetwork& net, NodeId node) {
  NodeBehavior b;
  for (std::size_t p = 0; p < kProfiles.size(); ++p) {
    const auto values = zone_values(net, node, kProfiles[p].zone, kProfiles[p].family);
    b.profiles[p] = stats::summarize(values);
  }
  return b;
}

std::array<double, kStatNames.size()> flatten(const stats::DistributionSummary& s) {
  auto v = [](const stats::Stat& x) { return x.value_or(0.0); };
  return {v(s.mean), v(s.sd), v(s.skewness), v(s.kurtosis), v(s.median), v(s.mad),
          v(s.l1),   v(s.l2), v(s.l3),       v(s.l4),       v(s.min),    v(s.max)};
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n(kEdgeLevelNames.begin(), kEdgeLevelNames.end());
    for (std::string_view endpoint : {".x", ".y"})
      for (const auto& prof : kProfiles) {
        for (auto stat : kStatNames) n.push_back(std::string(prof.prefix) + std::string(stat) + std::string(endpoint));
        n.push_back(std::string(prof.prefix) + "NA" + std::string(endpoint));
      }
    return n;
  }();
  return names;
}

EdgeFeatureVector edge_feature_vector(const TransitionNetwork& net, NodeId i, NodeId j) {
  const std::size_t ei = net.edge_index(i, j);
  EdgeFeatureVector v;
  fill_row(net, ei, make_cache(net, i), make_cache(net, j), v);
  return v;
}

EdgeFeatureVector edge_feature_vector(const TransitionNetwork& net, std::string_view i, std::string_view j) {
  return edge_feature_vector(net, net.node_id(i), net.node_id(j));
}

std::uint64_t schema_hash(const std::vector<std::string>& names) {
  Fnv1a h;
  h.update(kFeatureSchemaVersion);
  for (const auto& n : names) {
    h.update("\x1f");
    h.update(n);
  }
  return h.value();
}

std::uint64_t FeatureMatrix::schema_hash() const { return cict::schema_hash(names); }

std::size_t FeatureMatrix::column(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorKind::Schema, "no feature column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  FeatureMatrix out;
  out.names = names;
  out.values = Matrix(rows.size(), names.size());
  out.keys.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = values.row(rows[r]);
    std::copy(src.begin(), src.end(), out.values.row(r).begin());
    out.keys.push_back(keys[rows[r]]);
  }
  return out;
}

FeatureMatrix featurize_all(const TransitionNetwork& net, const EdgeFilter& filter, unsigned threads) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < net.edge_count(); ++i)
    if (net.edge(i).count >= filter.min_count) indices.push_back(i);
  return featurize_indices(net, indices, threads);
}

FeatureMatrix featurize_edges(const TransitionNetwork& net, const std::vector<EdgeKey>& edges, unsigned threads) {
  std::vector<std::size_t> indices;
  indices.reserve(edges.size());
  for (const auto& k : edges) indices.push_back(net.edge_index(net.node_id(k.source), net.node_id(k.target)));
  return featurize_indices(net, indices, threads);
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& fm) {
  std::vector<std::string> header{"source", "target"};
  header.insert(header.end(), fm.names.begin(), fm.names.end());
  csv::write_row(out, header);
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    fields.clear();
    fields.push_back(fm.keys[r].source);
    fields.push_back(fm.keys[r].target);
    for (double v : fm.values.row(r)) fields.push_back(csv::format_double(v));
    csv::write_row(out, fields);
  }
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  if (table.header.size() < 2 || table.header[0] != "source" || table.header[1] != "target")
    throw Error(ErrorKind::Format, path.string() + ": feature CSV must start with source,target");
  FeatureMatrix fm;
  fm.names.assign(table.header.begin() + 2, table.header.end());
  fm.values = Matrix(table.rows.size(), fm.names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    fm.keys.push_back(EdgeKey{row[0], row[1]});
    for (std::size_t c = 0; c < fm.names.size(); ++c) {
      const auto& cell = row[c + 2];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw Error(ErrorKind::Format, path.string() + ": non-numeric value '" + cell + "'");
      fm.values(r, c) = v;
    }
  }
  return fm;
}

}  // namespace cict
