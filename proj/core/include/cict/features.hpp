#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cict/graph.hpp"
#include "cict/matrix.hpp"
#include "cict/stats.hpp"

namespace cict {

inline constexpr std::string_view kFeatureSchemaVersion = "cict-features-v1";

/// Level-1, level-2 and level-3 parameters of one directed edge i -> j.
struct EdgeParams {
  double conf = 0, contrib = 0;          // count/out_total(i), count/in_total(j)
  double conf_rev = 0, contrib_rev = 0;  // same for j -> i; 0 when absent
  double nconf = 0, ncontrib = 0;        // conf * f_j / sum f, contrib * f_i / sum f
  double nconf_rev = 0, ncontrib_rev = 0;
  double lift_conf = 0, lift_contrib = 0;  // conf / (f_j / sum f), contrib / (f_i / sum f)
  double resistance = 0;                   // |f_i - f_j| / count
  double pressure = 0;                     // (f_i - f_j) * count / f_i
  double asym_conf = 0, asym_contrib = 0;  // forward minus reverse
};

/// Parameterization applied to a zone's edge set.
enum class Family { Raw, Normalized, Lift, Pressure, Resistance };

/// Zones around a node: 1 out-confidence, 2 out-contribution, 3 in-confidence,
/// 4 in-contribution.
enum class Zone { OutConf = 1, OutContrib = 2, InConf = 3, InContrib = 4 };

EdgeParams edge_params(const TransitionNetwork& net, NodeId i, NodeId j);
EdgeParams edge_params(const TransitionNetwork& net, std::string_view i, std::string_view j);

/// Values of one parameter family over a zone's edge set. Pressure and
/// resistance depend only on edge direction, so zones 1/2 and 3/4 coincide there.
std::vector<double> zone_values(const TransitionNetwork& net, NodeId node, Zone zone, Family family);

/// Distribution profiles kept per node: zone-prefixed names scf/scb/ocf/ocb with
/// raw, "N" (normalized) and "Lift" variants, plus Pout/Pin and Rout/Rin.
struct ProfileDef {
  std::string_view prefix;
  Zone zone;
  Family family;
};
inline constexpr std::array<ProfileDef, 16> kProfiles{{
    {"scf", Zone::OutConf, Family::Raw},
    {"scb", Zone::OutContrib, Family::Raw},
    {"ocf", Zone::InConf, Family::Raw},
    {"ocb", Zone::InContrib, Family::Raw},
    {"scfN", Zone::OutConf, Family::Normalized},
    {"scbN", Zone::OutContrib, Family::Normalized},
    {"ocfN", Zone::InConf, Family::Normalized},
    {"ocbN", Zone::InContrib, Family::Normalized},
    {"scfLift", Zone::OutConf, Family::Lift},
    {"scbLift", Zone::OutContrib, Family::Lift},
    {"ocfLift", Zone::InConf, Family::Lift},
    {"ocbLift", Zone::InContrib, Family::Lift},
    {"Pout", Zone::OutConf, Family::Pressure},
    {"Pin", Zone::InConf, Family::Pressure},
    {"Rout", Zone::OutConf, Family::Resistance},
    {"Rin", Zone::InConf, Family::Resistance},
}};

inline constexpr std::array<std::string_view, 12> kStatNames{
    "Mean", "SD", "Skew", "Kurt", "Median", "MAD", "L1", "L2", "L3", "L4", "Min", "Max"};

/// Per-node distribution summaries, one per entry of kProfiles.
struct NodeBehavior {
  std::array<stats::DistributionSummary, kProfiles.size()> profiles;
};

NodeBehavior node_behavior(const TransitionNetwork& net, NodeId node);

/// Values of a summary in kStatNames order; undefined statistics become 0.
std::array<double, kStatNames.size()> flatten(const stats::DistributionSummary& s);

/// Column names of an edge feature row, identical for every edge.
const std::vector<std::string>& feature_names();

struct EdgeFeatureVector {
  EdgeParams params;
  double tz = 0;
  bool tz_degenerate = false;
  double intvl_median = 0;
  std::vector<double> values;  // aligned with feature_names()
};

EdgeFeatureVector edge_feature_vector(const TransitionNetwork& net, NodeId i, NodeId j);
EdgeFeatureVector edge_feature_vector(const TransitionNetwork& net, std::string_view i, std::string_view j);

struct EdgeKey {
  std::string source;
  std::string target;

  auto operator<=>(const EdgeKey&) const = default;
};

/// Named feature columns over a list of edges.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<EdgeKey> keys;
  Matrix values;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
  std::uint64_t schema_hash() const;
  std::size_t column(std::string_view name) const;  // throws Error{Schema}

  FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;

  bool operator==(const FeatureMatrix&) const = default;
};

std::uint64_t schema_hash(const std::vector<std::string>& names);

struct EdgeFilter {
  std::size_t min_count = 1;
};

/// One row per edge passing the filter, sorted by (source, target).
FeatureMatrix featurize_all(const TransitionNetwork& net, const EdgeFilter& filter = {}, unsigned threads = 1);

/// Rows for the given edges in the given order. Throws Error{Lookup} for a missing edge.
FeatureMatrix featurize_edges(const TransitionNetwork& net, const std::vector<EdgeKey>& edges,
                              unsigned threads = 1);

/// CSV with header `source,target,<feature names>`; values round-trip exactly.
void write_feature_csv(std::ostream& out, const FeatureMatrix& fm);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace cict
