#include "cict/labels.hpp"

#include <ostream>

#include "cict/csv.hpp"
#include "cict/error.hpp"

namespace cict {

std::string_view to_string(EdgeLabel label) noexcept {
  switch (label) {
    case EdgeLabel::Causal: return "causal";
    case EdgeLabel::ReverseCausal: return "reverse_causal";
    case EdgeLabel::Random: return "random";
    case EdgeLabel::EarlyEffectCommonCause: return "early_effect_common_cause";
    case EdgeLabel::Coexistence: return "coexistence";
    case EdgeLabel::None: return "none";
  }
  return "none";
}

EdgeLabel parse_label(std::string_view text) {
  for (auto l : {EdgeLabel::Causal, EdgeLabel::ReverseCausal, EdgeLabel::Random, EdgeLabel::EarlyEffectCommonCause,
                 EdgeLabel::Coexistence, EdgeLabel::None})
    if (to_string(l) == text) return l;
  throw Error(ErrorKind::Format, "unknown edge label '" + std::string(text) + "'");
}

LabelMap read_label_csv(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  const auto s = table.column("source");
  const auto t = table.column("target");
  const auto l = table.column("label");
  LabelMap out;
  for (const auto& row : table.rows) out[EdgeKey{row[s], row[t]}] = parse_label(row[l]);
  return out;
}

void write_label_csv(std::ostream& out, const LabelMap& labels) {
  out << "source,target,label\n";
  for (const auto& [key, label] : labels) csv::write_row(out, {key.source, key.target, std::string(to_string(label))});
}

}  // namespace cict
