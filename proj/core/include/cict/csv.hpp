#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cict::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split(std::string_view line);

/// Quotes a field only when it contains a separator, quote or newline.
std::string escape(std::string_view field);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Whole-table reader: header plus rows. Throws Error{Io} if the file cannot be
/// opened and Error{Format} on ragged rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws Error{Format}
};

Table read_table(const std::filesystem::path& path);
Table read_table(std::istream& in, const std::string& origin);

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace cict::csv
