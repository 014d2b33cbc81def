#include "cict/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "cict/csv.hpp"
#include "cict/error.hpp"

namespace cict {
namespace {

std::optional<std::int64_t> parse_int64(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<EventRecord> parse_csv_record(const std::string& line) {
  auto fields = csv::split(line);
  if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) return std::nullopt;
  auto ts = parse_int64(fields[2]);
  if (!ts) return std::nullopt;
  return EventRecord{std::move(fields[0]), std::move(fields[1]), *ts};
}

std::optional<EventRecord> parse_jsonl_record(const std::string& line) {
  auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) return std::nullopt;
  auto entity = doc.find("entity_id");
  auto code = doc.find("event_code");
  auto ts = doc.find("timestamp");
  if (entity == doc.end() || code == doc.end() || ts == doc.end()) return std::nullopt;
  if (!entity->is_string() || !code->is_string() || !ts->is_number_integer()) return std::nullopt;
  EventRecord rec{entity->get<std::string>(), code->get<std::string>(), ts->get<std::int64_t>()};
  if (rec.entity_id.empty() || rec.event_code.empty()) return std::nullopt;
  return rec;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

std::map<std::string, std::size_t> SequenceDataset::code_frequencies() const {
  std::map<std::string, std::size_t> freq;
  for (const auto& e : entities)
    for (const auto& r : e.events) ++freq[r.event_code];
  return freq;
}

EventFormat parse_format(const std::string& name) {
  if (name == "csv") return EventFormat::Csv;
  if (name == "jsonl") return EventFormat::Jsonl;
  throw Error(ErrorKind::Config, "unknown event format '" + name + "' (expected csv or jsonl)");
}

SequenceDataset make_dataset(std::vector<EventRecord> records) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<EntityHistory> groups;
  for (auto& r : records) {
    auto [it, inserted] = slot.try_emplace(r.entity_id, groups.size());
    if (inserted) groups.push_back(EntityHistory{r.entity_id, {}});
    groups[it->second].events.push_back(std::move(r));
  }
  std::sort(groups.begin(), groups.end(),
            [](const EntityHistory& a, const EntityHistory& b) { return a.entity_id < b.entity_id; });
  SequenceDataset ds;
  for (auto& g : groups) {
    std::stable_sort(g.events.begin(), g.events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    ds.record_count += g.events.size();
  }
  ds.entities = std::move(groups);
  return ds;
}

SequenceDataset parse_events(std::istream& in, EventFormat format) {
  std::vector<EventRecord> records;
  std::size_t data_lines = 0;
  std::size_t malformed = 0;
  std::optional<std::size_t> first_bad;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = format == EventFormat::Jsonl;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (!header_seen) {
      auto header = csv::split(line);
      if (header != std::vector<std::string>{"entity_id", "event_code", "timestamp"})
        throw Error(ErrorKind::Format, "line " + std::to_string(line_no) +
                                           ": expected header 'entity_id,event_code,timestamp'");
      header_seen = true;
      continue;
    }
    ++data_lines;
    auto rec = format == EventFormat::Csv ? parse_csv_record(line) : parse_jsonl_record(line);
    if (!rec) {
      ++malformed;
      if (!first_bad) first_bad = line_no;
      continue;
    }
    records.push_back(std::move(*rec));
  }
  if (in.bad()) throw Error(ErrorKind::Io, "read failure on event stream");
  if (malformed * 2 > data_lines)
    throw Error(ErrorKind::Format, std::to_string(malformed) + " of " + std::to_string(data_lines) +
                                       " lines malformed; first offending line " + std::to_string(*first_bad));

  SequenceDataset ds = make_dataset(std::move(records));
  ds.malformed_count = malformed;
  ds.first_malformed_line = first_bad;
  return ds;
}

SequenceDataset load_events(const std::filesystem::path& path, EventFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse_events(in, format);
}

void write_events_csv(std::ostream& out, const SequenceDataset& ds) {
  out << "entity_id,event_code,timestamp\n";
  for (const auto& e : ds.entities)
    for (const auto& r : e.events)
      csv::write_row(out, {r.entity_id, r.event_code, std::to_string(r.timestamp)});
}

std::vector<Transition> extract_transitions(const SequenceDataset& ds) {
  std::vector<Transition> out;
  for (const auto& e : ds.entities) {
    for (std::size_t k = 1; k < e.events.size(); ++k) {
      const auto& prev = e.events[k - 1];
      const auto& next = e.events[k];
      out.push_back(Transition{prev.event_code, next.event_code, next.timestamp - prev.timestamp});
    }
  }
  return out;
}

std::vector<Transition> filter_by_edge_count(const std::vector<Transition>& ts, std::size_t min_count) {
  if (min_count <= 1) return ts;
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> counts;
  for (const auto& t : ts) ++counts[{t.source, t.target}];
  std::vector<Transition> out;
  for (const auto& t : ts)
    if (counts[{t.source, t.target}] >= min_count) out.push_back(t);
  return out;
}

std::vector<Transition> filter_by_max_interval(const std::vector<Transition>& ts, std::int64_t max_interval) {
  std::vector<Transition> out;
  std::copy_if(ts.begin(), ts.end(), std::back_inserter(out),
               [&](const Transition& t) { return t.interval <= max_interval; });
  return out;
}

void write_transitions_csv(std::ostream& out, const std::vector<Transition>& ts) {
  out << "source,target,interval\n";
  for (const auto& t : ts) csv::write_row(out, {t.source, t.target, std::to_string(t.interval)});
}

std::vector<Transition> read_transitions_csv(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  const auto src = table.column("source");
  const auto dst = table.column("target");
  const auto itv = table.column("interval");
  std::vector<Transition> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto interval = parse_int64(row[itv]);
    if (!interval || *interval < 0)
      throw Error(ErrorKind::Format, path.string() + ": bad interval '" + row[itv] + "'");
    out.push_back(Transition{row[src], row[dst], *interval});
  }
  return out;
}

}  // namespace cict
