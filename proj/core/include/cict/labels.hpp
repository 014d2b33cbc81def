#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "cict/features.hpp"

namespace cict {

enum class EdgeLabel { Causal, ReverseCausal, Random, EarlyEffectCommonCause, Coexistence, None };

std::string_view to_string(EdgeLabel label) noexcept;
EdgeLabel parse_label(std::string_view text);  // throws Error{Format}

using LabelMap = std::map<EdgeKey, EdgeLabel>;

/// `source,target,label` CSV.
LabelMap read_label_csv(const std::filesystem::path& path);
void write_label_csv(std::ostream& out, const LabelMap& labels);

}  // namespace cict
