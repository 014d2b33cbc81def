#include "cict/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "cict/error.hpp"

namespace cict {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Lookup: return "lookup error";
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Training: return "training error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Metric: return "metric error";
    case ErrorKind::Stratification: return "stratification error";
    case ErrorKind::Sampling: return "sampling error";
    case ErrorKind::Spec: return "spec error";
    case ErrorKind::Config: return "configuration error";
  }
  return "error";
}

namespace csv {

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorKind::Format, "missing column '" + std::string(name) + "'");
}

Table read_table(std::istream& in, const std::string& origin) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(ErrorKind::Format, origin + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.header.size()) + " fields, got " +
                                         std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_table(in, path.string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace csv
}  // namespace cict
